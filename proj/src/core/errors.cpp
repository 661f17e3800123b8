#include "isslab/error.hpp"

namespace isslab {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "ok";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kDimension: return "dimension error";
    case ErrorCode::kIteration: return "iteration failure";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kConfig: return "configuration error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kInternal: return "internal error";
  }
  return "unknown error";
}

}  // namespace isslab
