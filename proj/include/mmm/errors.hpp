#pragma once
#include <stdexcept>
#include <string>

namespace mmm {

// Machine-parsable error codes; the CLI prints them as "ERROR <code>: <message>".
enum class ErrorCode {
    domain,              // argument outside the supported domain
    overflow,            // value exceeds double range
    degenerate_expiry,   // T at or below the degenerate-expiry threshold
    expiry_range,        // T beyond the supported large-T cap
    bounds_low,          // target price at or below the lower arbitrage bound
    bounds_high,         // target price at or above the upper arbitrage bound
    no_convergence,      // iteration/refinement budget exhausted
    nonpositive_excess,  // call price does not exceed intrinsic at this precision
    negative_radicand,   // asymptotic formula outside its validity regime
    atm_strike,          // strike indistinguishable from spot for this operation
    config               // bad configuration input
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace mmm
