#include "cecib/error.hpp"

namespace cecib {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::EmptyCluster: return "empty-cluster";
    case ErrorKind::DegenerateModel: return "degenerate-model";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace cecib
