#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace chj {

// Dimension of the torus is at most two. Components at index >= dim are
// kept at zero so that Vec arithmetic stays dimension-agnostic.
inline constexpr int kMaxDim = 2;

using Vec = std::array<double, kMaxDim>;
using Winding = std::array<long, kMaxDim>;

inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1]}; }

inline bool all_finite(const Vec& a) { return std::isfinite(a[0]) && std::isfinite(a[1]); }

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid construction parameters or configuration values.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace chj
