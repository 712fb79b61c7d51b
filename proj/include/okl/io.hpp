#pragma once

#include <string>

#include "okl/hypothesis.hpp"
#include "okl/trainers.hpp"

namespace okl {

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

/// Header t,gamma_t,rkhs_norm,lemma4_envelope,heldout_risk,excess_risk and one
/// row per checkpoint; absent values are empty fields.
std::string trajectory_csv(const TrajectoryRecord& record);

/// One row per center: coordinates then coefficient (x0,...,coefficient).
std::string expansion_records(const DualExpansion& h);
/// Pair terms: first-point coordinates, second-point coordinates, coefficient.
std::string expansion_records(const PairExpansion& f);

/// Inverse of expansion_records. DataError on malformed rows.
DualExpansion parse_expansion_records(const std::string& text, const Kernel& kernel);
PairExpansion parse_pair_expansion_records(const std::string& text, const PairKernel& kernel);

/// Writes the file, creating parent directories. IoError on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace okl
