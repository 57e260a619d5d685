#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hsto {

enum class ErrorKind {
    invalid_spec,
    unsupported_kind,
    grid_mismatch,
    solver_divergence,
    hypothesis_violation,
    missing_terms,
    unsorted_series,
    empty_set,
    parse_error,
    unknown_key,
    invalid_value,
    io_error,
    blowup_detected,
};

std::string_view to_string(ErrorKind kind);

/// Exception carrying a machine-readable error kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// True for errors caused by bad input (exit code 1) rather than runtime failure.
    bool is_validation() const noexcept {
        switch (kind_) {
        case ErrorKind::invalid_spec:
        case ErrorKind::unsupported_kind:
        case ErrorKind::grid_mismatch:
        case ErrorKind::parse_error:
        case ErrorKind::unknown_key:
        case ErrorKind::invalid_value:
        case ErrorKind::hypothesis_violation:
        case ErrorKind::missing_terms:
        case ErrorKind::unsorted_series:
        case ErrorKind::empty_set:
            return true;
        default:
            return false;
        }
    }

private:
    ErrorKind kind_;
};

} // namespace hsto
