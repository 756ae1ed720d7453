// Exception types thrown by the ringcorr library.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ringcorr {

/// Argument outside the mathematical domain of an operation.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A series needed more terms than the caller's cap allows.
class resource_limit_error : public std::runtime_error {
public:
    resource_limit_error(const std::string& what, std::int64_t cap)
        : std::runtime_error(what + " (term cap " + std::to_string(cap) + ")"), cap_(cap) {}

    std::int64_t cap() const noexcept { return cap_; }

private:
    std::int64_t cap_;
};

/// Result not representable in double precision (exponent overflow).
class range_error : public std::range_error {
public:
    using std::range_error::range_error;
};

/// Iterative procedure failed to meet its tolerance. Carries the final bracket.
class numeric_error : public std::runtime_error {
public:
    numeric_error(const std::string& what, double lo, double hi)
        : std::runtime_error(what), lo_(lo), hi_(hi) {}

    double bracket_lo() const noexcept { return lo_; }
    double bracket_hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

} // namespace ringcorr
