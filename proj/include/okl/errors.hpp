#pragma once

#include <stdexcept>
#include <string>

namespace okl {

enum class ErrorKind {
  Domain,
  Shape,
  Label,
  State,
  Data,
  Config,
  Precondition,
  UnsupportedLoss,
  NumericalPsd,
  Fit,
  Io,
  Usage,
  Study,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define OKL_DEFINE_ERROR(Name, Kind)                                  \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

OKL_DEFINE_ERROR(DomainError, Domain)
OKL_DEFINE_ERROR(ShapeError, Shape)
OKL_DEFINE_ERROR(LabelError, Label)
OKL_DEFINE_ERROR(StateError, State)
OKL_DEFINE_ERROR(DataError, Data)
OKL_DEFINE_ERROR(ConfigError, Config)
OKL_DEFINE_ERROR(PreconditionError, Precondition)
OKL_DEFINE_ERROR(UnsupportedLossError, UnsupportedLoss)
OKL_DEFINE_ERROR(NumericalPsdError, NumericalPsd)
OKL_DEFINE_ERROR(FitError, Fit)
OKL_DEFINE_ERROR(IoError, Io)
OKL_DEFINE_ERROR(UsageError, Usage)
OKL_DEFINE_ERROR(StudyError, Study)

#undef OKL_DEFINE_ERROR

}  // namespace okl
