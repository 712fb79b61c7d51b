#include "okl/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "okl/errors.hpp"

namespace okl {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

void put_optional(std::string& out, const std::optional<double>& v) {
  out += ',';
  if (v) out += format_double(*v);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_field(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    std::ostringstream msg;
    msg << "line " << line_no << ": cannot parse '" << s << "' as a number";
    throw DataError(msg.str());
  }
  return v;
}

std::vector<std::vector<double>> parse_rows(const std::string& text, std::size_t& columns) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("expansion records: missing header");
  columns = split_row(line).size();
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_row(line);
    if (fields.size() != columns) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected " << columns << " fields, got " << fields.size();
      throw DataError(msg.str());
    }
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(parse_field(f, line_no));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string trajectory_csv(const TrajectoryRecord& record) {
  std::string out = "t,gamma_t,rkhs_norm,lemma4_envelope,heldout_risk,excess_risk\n";
  for (const auto& r : record.rows) {
    out += std::to_string(r.t);
    out += ',';
    out += format_double(r.gamma_t);
    out += ',';
    out += format_double(r.rkhs_norm);
    put_optional(out, r.lemma4_envelope);
    put_optional(out, r.heldout_risk);
    put_optional(out, r.excess_risk);
    out += '\n';
  }
  return out;
}

std::string expansion_records(const DualExpansion& h) {
  std::string out;
  for (std::size_t k = 0; k < h.dim(); ++k) out += "x" + std::to_string(k) + ",";
  out += "coefficient\n";
  const auto coefs = h.coefficients();
  for (std::size_t i = 0; i < h.size(); ++i) {
    for (std::size_t k = 0; k < h.dim(); ++k) out += format_double(h.centers().at(i, k)) + ",";
    out += format_double(coefs[i]) + "\n";
  }
  return out;
}

std::string expansion_records(const PairExpansion& f) {
  std::string out;
  for (std::size_t k = 0; k < f.dim(); ++k) out += "u" + std::to_string(k) + ",";
  for (std::size_t k = 0; k < f.dim(); ++k) out += "v" + std::to_string(k) + ",";
  out += "coefficient\n";
  const auto& pts = f.points();
  for (const auto& b : f.blocks()) {
    for (std::size_t t = b.begin; t < b.end; ++t) {
      for (std::size_t k = 0; k < f.dim(); ++k) out += format_double(pts.at(b.anchor, k)) + ",";
      for (std::size_t k = 0; k < f.dim(); ++k) out += format_double(pts.at(f.partners()[t], k)) + ",";
      out += format_double(f.coefficients()[t]) + "\n";
    }
  }
  return out;
}

DualExpansion parse_expansion_records(const std::string& text, const Kernel& kernel) {
  std::size_t columns = 0;
  const auto rows = parse_rows(text, columns);
  if (columns < 2) throw DataError("expansion records need at least one coordinate column");
  DualExpansion h(kernel, columns - 1);
  for (const auto& row : rows) {
    h.add_scaled_section(std::span<const double>(row.data(), columns - 1), row.back());
  }
  return h;
}

PairExpansion parse_pair_expansion_records(const std::string& text, const PairKernel& kernel) {
  std::size_t columns = 0;
  const auto rows = parse_rows(text, columns);
  if (columns < 3 || (columns - 1) % 2 != 0) throw DataError("pair records need 2d + 1 columns");
  const std::size_t d = (columns - 1) / 2;
  PairExpansion f(kernel, d, {.merge_duplicates = true, .track_norm = false});
  for (const auto& row : rows) {
    f.add_scaled_section(std::span<const double>(row.data(), d), std::span<const double>(row.data() + d, d),
                         row.back());
  }
  return f;
}

void write_text_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const fs::path p(path);
  if (p.has_parent_path()) {
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + p.parent_path().string() + "': " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("error while writing '" + path + "'");
}

}  // namespace okl
