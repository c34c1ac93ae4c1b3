#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <span>
#include <stdexcept>

namespace nld {

inline constexpr int kMaxDim = 8;

/// Small fixed-capacity vector in R^d, d <= kMaxDim. No heap traffic in the walkers.
struct Point {
    std::array<double, kMaxDim> c{};
    int dim = 0;

    Point() = default;
    explicit Point(int d) : dim(d) {
        if (d < 1 || d > kMaxDim) throw std::invalid_argument("Point: dimension out of range");
    }
    Point(std::initializer_list<double> v) : Point(int(v.size())) {
        int i = 0;
        for (double x : v) c[i++] = x;
    }
    static Point from(std::span<const double> v) {
        Point p(int(v.size()));
        for (int i = 0; i < p.dim; ++i) p.c[i] = v[i];
        return p;
    }
    /// Unit vector e_axis (axis counted from 0).
    static Point unit(int d, int axis) {
        Point p(d);
        p.c[axis] = 1.0;
        return p;
    }

    double& operator[](int i) { return c[i]; }
    double operator[](int i) const { return c[i]; }
    [[nodiscard]] std::span<const double> span() const { return {c.data(), std::size_t(dim)}; }
    /// Last coordinate, the distinguished axis throughout.
    [[nodiscard]] double last() const { return c[dim - 1]; }

    Point& operator+=(const Point& o) {
        for (int i = 0; i < dim; ++i) c[i] += o.c[i];
        return *this;
    }
    Point& operator-=(const Point& o) {
        for (int i = 0; i < dim; ++i) c[i] -= o.c[i];
        return *this;
    }
    Point& operator*=(double s) {
        for (int i = 0; i < dim; ++i) c[i] *= s;
        return *this;
    }
};

inline Point operator+(Point a, const Point& b) { return a += b; }
inline Point operator-(Point a, const Point& b) { return a -= b; }
inline Point operator*(Point a, double s) { return a *= s; }
inline Point operator*(double s, Point a) { return a *= s; }

inline double dot(const Point& a, const Point& b) {
    double s = 0.0;
    for (int i = 0; i < a.dim; ++i) s += a.c[i] * b.c[i];
    return s;
}
inline double norm2(const Point& a) { return dot(a, a); }
inline double norm(const Point& a) { return std::sqrt(norm2(a)); }
inline double distance(const Point& a, const Point& b) { return norm(a - b); }

}  // namespace nld
