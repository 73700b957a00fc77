#include "hypcover/error.hpp"

namespace hypcover {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidElement: return "invalid-element";
    case ErrorKind::NonTermination: return "non-termination";
    case ErrorKind::Calibration: return "calibration";
    case ErrorKind::InvalidSize: return "invalid-size";
    case ErrorKind::NotConnected: return "not-connected";
    case ErrorKind::IncompatibleCharacter: return "incompatible-character";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Mesh: return "mesh";
    case ErrorKind::Assembly: return "assembly";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Overflow: return "overflow";
    case ErrorKind::InvalidBand: return "invalid-band";
    case ErrorKind::InvalidConfig: return "invalid-config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace hypcover
