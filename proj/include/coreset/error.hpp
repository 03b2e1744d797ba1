#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace coreset {

enum class ErrorKind {
    config,             // bad user configuration
    unsupported,        // valid request the library does not implement
    io,                 // unreadable or malformed file
    precondition,       // a documented precondition was violated
    dimension_mismatch, // vectors of different lengths
    domain,             // input outside the mathematical domain (e.g. k <= 0)
    numeric             // overflow, NaN, degenerate denominator
};

//! Process exit code for a failure of the given kind.
//! config/unsupported/io -> 2, precondition/dimension -> 3, domain/numeric -> 4.
int exit_code(ErrorKind kind);
std::string_view kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message, std::string field = {},
          std::optional<std::size_t> index = std::nullopt)
        : std::runtime_error(std::move(message)), kind_(kind), field_(std::move(field)), index_(index) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& field() const noexcept { return field_; }
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    ErrorKind kind_;
    std::string field_;
    std::optional<std::size_t> index_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string message, std::string field = {},
                              std::optional<std::size_t> index = std::nullopt) {
    throw Error(kind, std::move(message), std::move(field), index);
}

inline void require(bool ok, ErrorKind kind, std::string_view message, std::string_view field = {}) {
    if (!ok) fail(kind, std::string(message), std::string(field));
}

} // namespace coreset
