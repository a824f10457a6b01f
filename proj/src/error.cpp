#include "moon/error.hpp"

namespace moon {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Pole: return "pole";
    case ErrorKind::UnreachableMagnification: return "unreachable_magnification";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::ArgumentOrder: return "argument_order";
    case ErrorKind::BehindCamera: return "behind_camera";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::Sequencing: return "sequencing";
    case ErrorKind::SessionOver: return "session_over";
    case ErrorKind::NotReady: return "not_ready";
    case ErrorKind::NotFound: return "not_found";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace moon
