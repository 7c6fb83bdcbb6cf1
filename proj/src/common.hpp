#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace prlab {

enum class Status : int {
    ok = 0,
    invalid_argument = 1,
    precondition = 2,
    cfl = 3,
    io = 4,
    parse = 5,
    check_failed = 6,
    internal = 7,
};

class Error : public std::runtime_error {
public:
    Error(Status code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Status code() const noexcept { return code_; }

private:
    Status code_;
};

[[noreturn]] inline void fail(Status code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Status code, const std::string& what) {
    if (!cond) fail(code, what);
}

constexpr int kMaxDim = 3;
using Vec = std::array<double, kMaxDim>;

/// Space-time point (x, t) with x in R^d, d in {1,2,3}.
struct Point {
    int d = 1;
    Vec x{0.0, 0.0, 0.0};
    double t = 0.0;
};

inline Point make_point(double x0, double t) { return Point{1, {x0, 0.0, 0.0}, t}; }
inline Point make_point(double x0, double x1, double t) { return Point{2, {x0, x1, 0.0}, t}; }

inline double dot(const Vec& a, const Vec& b, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a, int d) { return dot(a, a, d); }

inline double dist2(const Vec& a, const Vec& b, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        const double e = a[i] - b[i];
        s += e * e;
    }
    return s;
}

inline const double kPi = std::acos(-1.0);
inline const double kSqrt2 = std::sqrt(2.0);

/// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
    switch (d) {
    case 1: return 2.0;
    case 2: return kPi;
    case 3: return 4.0 * kPi / 3.0;
    default: fail(Status::invalid_argument, "dimension must be 1, 2 or 3");
    }
}

inline void check_dim(int d, int max_d = kMaxDim) {
    require(d >= 1 && d <= max_d, Status::invalid_argument,
            "dimension " + std::to_string(d) + " out of range [1," + std::to_string(max_d) + "]");
}

}  // namespace prlab
