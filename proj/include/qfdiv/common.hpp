#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qfdiv {

// Extended reals are plain IEEE doubles; +inf / -inf are meaningful values.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class UnsupportedFamilyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RankChangeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Interval on the extended real line with independent closedness of the ends.
struct Interval {
    double lower = -kInf;
    double upper = kInf;
    bool lower_closed = false;
    bool upper_closed = false;

    bool contains(double t) const
    {
        if (std::isnan(t)) return false;
        bool lo = lower_closed ? t >= lower : t > lower;
        bool hi = upper_closed ? t <= upper : t < upper;
        return lo && hi;
    }
    bool bounded_below() const { return std::isfinite(lower); }
    bool bounded_above() const { return std::isfinite(upper); }
};

} // namespace qfdiv
