#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace quantcert {

enum class ErrorCode {
    out_of_range,
    degenerate,
    domain_error,
    invalid_interval,
    invalid_confidence,
    oracle_failure,
    dimension_mismatch,
    spawn_failure,
    protocol_violation,
    child_exit,
    parse_error,
    shape_error,
    non_finite_weight,
    no_yes_found,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (the CLI in particular) can map it without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace quantcert
