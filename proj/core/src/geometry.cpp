#include "cubiclab/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace cubiclab {

Mat2 Mat2::inverse() const {
  const double dt = det();
  if (dt == 0.0) throw std::domain_error("singular 2x2 matrix");
  return {d / dt, -b / dt, -c / dt, a / dt};
}

double Mat2::max_abs() const { return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)}); }

namespace {

Vec2 eigenvector(const Mat2& m, double lambda) {
  // Rows of (m - lambda I) are orthogonal to the eigenvector; use the larger one.
  Vec2 r1{m.a - lambda, m.b}, r2{m.c, m.d - lambda};
  Vec2 r = r1.norm() >= r2.norm() ? r1 : r2;
  Vec2 v = r.norm() == 0.0 ? Vec2{1.0, 0.0} : Vec2{-r.y, r.x};
  v = v / v.norm();
  if (v.x < 0 || (v.x == 0 && v.y < 0)) v = -v;
  return v;
}

}  // namespace

Eigen2 eigen(const Mat2& m) {
  Eigen2 e;
  const double tr = m.trace(), dt = m.det();
  const double disc = tr * tr / 4.0 - dt;
  if (disc < 0) {
    e.real = false;
    const double im = std::sqrt(-disc);
    e.values = {std::complex<double>(tr / 2, im), std::complex<double>(tr / 2, -im)};
    e.vectors = {Vec2{1, 0}, Vec2{0, 1}};
    return e;
  }
  const double s = std::sqrt(disc);
  // Stable root pairing: the larger-modulus root directly, the other via det.
  const double big = tr >= 0 ? tr / 2 + s : tr / 2 - s;
  const double small = big != 0.0 ? dt / big : tr / 2 - s;
  e.values = {big, small};
  e.vectors = {eigenvector(m, big), eigenvector(m, small)};
  return e;
}

}  // namespace cubiclab
