#include "coreset/error.hpp"

namespace coreset {

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::config:
    case ErrorKind::unsupported:
    case ErrorKind::io: return 2;
    case ErrorKind::precondition:
    case ErrorKind::dimension_mismatch: return 3;
    case ErrorKind::domain:
    case ErrorKind::numeric: return 4;
    }
    return 1;
}

std::string_view kind_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::io: return "io";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::dimension_mismatch: return "dimension_mismatch";
    case ErrorKind::domain: return "domain";
    case ErrorKind::numeric: return "numeric";
    }
    return "unknown";
}

} // namespace coreset
