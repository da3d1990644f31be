#include "mmm/errors.hpp"

namespace mmm {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::domain: return "domain";
        case ErrorCode::overflow: return "overflow";
        case ErrorCode::degenerate_expiry: return "degenerate_expiry";
        case ErrorCode::expiry_range: return "expiry_range";
        case ErrorCode::bounds_low: return "bounds_low";
        case ErrorCode::bounds_high: return "bounds_high";
        case ErrorCode::no_convergence: return "no_convergence";
        case ErrorCode::nonpositive_excess: return "nonpositive_excess";
        case ErrorCode::negative_radicand: return "negative_radicand";
        case ErrorCode::atm_strike: return "atm_strike";
        case ErrorCode::config: return "config";
    }
    return "unknown";
}

} // namespace mmm
