#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <ostream>

namespace cubiclab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

  friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend Vec2 operator/(const Vec2& a, double s) { return {a.x / s, a.y / s}; }
  friend bool operator==(const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }
  friend std::ostream& operator<<(std::ostream& os, const Vec2& v) { return os << '(' << v.x << ", " << v.y << ')'; }

  double norm() const { return std::hypot(x, y); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

/// Row-major [[a, b], [c, d]].
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  static Mat2 identity() { return {}; }
  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }
  Mat2 inverse() const;  // std::domain_error when singular

  friend Vec2 operator*(const Mat2& m, const Vec2& v) { return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y}; }
  friend Mat2 operator*(const Mat2& m, const Mat2& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
  }
  friend Mat2 operator-(const Mat2& m, const Mat2& n) { return {m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d}; }
  double max_abs() const;
};

/// Eigenvalues ordered by decreasing modulus. Eigenvectors are unit length
/// and only meaningful when the spectrum is real.
struct Eigen2 {
  std::array<std::complex<double>, 2> values;
  std::array<Vec2, 2> vectors;
  bool real = true;
};

Eigen2 eigen(const Mat2& m);

/// Axis-aligned rectangle.
struct Box2 {
  double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;

  bool contains(const Vec2& p) const { return x_lo <= p.x && p.x <= x_hi && y_lo <= p.y && p.y <= y_hi; }
  double width() const { return x_hi - x_lo; }
  double height() const { return y_hi - y_lo; }
};

}  // namespace cubiclab
