#include "okl/errors.hpp"

namespace okl {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::Label: return "label error";
    case ErrorKind::State: return "state error";
    case ErrorKind::Data: return "data error";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Precondition: return "precondition violation";
    case ErrorKind::UnsupportedLoss: return "unsupported loss";
    case ErrorKind::NumericalPsd: return "numerical PSD error";
    case ErrorKind::Fit: return "fit error";
    case ErrorKind::Io: return "io error";
    case ErrorKind::Usage: return "usage error";
    case ErrorKind::Study: return "study error";
  }
  return "error";
}

}  // namespace okl
