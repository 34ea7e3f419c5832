#include "plateflow/errors.hpp"

namespace plateflow {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::shape: return "shape";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::wrong_entry: return "wrong_entry";
    case ErrorKind::incompatible: return "incompatible";
    case ErrorKind::excluded_mode: return "excluded_mode";
    case ErrorKind::incomplete: return "incomplete";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::solver: return "solver";
    case ErrorKind::parse: return "parse";
    case ErrorKind::periodicity: return "periodicity";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace plateflow
