#include "cubiclab/planar.hpp"

#include "cubiclab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cubiclab::planar {

Mat2 PlanarMap::finite_difference_jacobian(const Vec2& p, double h) const {
  const double hx = h * std::max(1.0, std::abs(p.x));
  const double hy = h * std::max(1.0, std::abs(p.y));
  Vec2 dx = (forward({p.x + hx, p.y}) - forward({p.x - hx, p.y})) / (2 * hx);
  Vec2 dy = (forward({p.x, p.y + hy}) - forward({p.x, p.y - hy})) / (2 * hy);
  return {dx.x, dy.x, dx.y, dy.y};
}

Mat2 PlanarMap::jacobian_at(const Vec2& p) const {
  return jacobian ? jacobian(p) : finite_difference_jacobian(p);
}

Vec2 PlanarMap::power(const Vec2& p, int period) const {
  Vec2 q = p;
  for (int i = 0; i < period; ++i) q = forward(q);
  return q;
}

Mat2 PlanarMap::power_jacobian(const Vec2& p, int period) const {
  Mat2 j = Mat2::identity();
  Vec2 q = p;
  for (int i = 0; i < period; ++i) {
    j = jacobian_at(q) * j;
    q = forward(q);
  }
  return j;
}

PlanarMap PlanarFamily::operator()(const Params& p) const {
  if (p.size() != parameter_names.size())
    throw std::invalid_argument(name + ": expected " + std::to_string(parameter_names.size()) + " parameters");
  return member(p);
}

PlanarFamily linear_family() {
  PlanarFamily fam{"linear", {"lambda", "sigma"}, {}};
  fam.member = [](const Params& p) {
    const double l = p[0], s = p[1];
    PlanarMap m;
    m.name = "linear";
    m.params = {{"lambda", l}, {"sigma", s}};
    m.forward = [l, s](const Vec2& v) { return Vec2{l * v.x, s * v.y}; };
    if (l != 0 && s != 0) m.inverse = [l, s](const Vec2& v) { return Vec2{v.x / l, v.y / s}; };
    m.jacobian = [l, s](const Vec2&) { return Mat2{l, 0, 0, s}; };
    return m;
  };
  return fam;
}

PlanarFamily cubic_henon_family() {
  PlanarFamily fam{"cubic_henon", {"a", "b"}, {}};
  fam.member = [](const Params& p) {
    const double a = p[0], b = p[1];
    PlanarMap m;
    m.name = "cubic_henon";
    m.params = {{"a", a}, {"b", b}};
    m.forward = [a, b](const Vec2& v) { return Vec2{b * v.y, -v.y * v.y * v.y + a * v.y + v.x}; };
    if (b != 0) {
      m.inverse = [a, b](const Vec2& v) {
        const double y = v.x / b;
        return Vec2{v.y + y * y * y - a * y, y};
      };
    }
    m.jacobian = [a, b](const Vec2& v) { return Mat2{0, b, 1, -3 * v.y * v.y + a}; };
    return m;
  };
  return fam;
}

PlanarFamily limit_endomorphism_family() {
  PlanarFamily fam{"limit_endomorphism", {"mu_bar", "nu_bar"}, {}};
  fam.member = [](const Params& p) {
    const double mu = p[0], nu = p[1];
    PlanarMap m;
    m.name = "limit_endomorphism";
    m.params = {{"mu_bar", mu}, {"nu_bar", nu}};
    m.forward = [mu, nu](const Vec2& v) { return Vec2{v.y, -v.y * v.y * v.y + mu * v.y + nu}; };
    m.jacobian = [mu](const Vec2& v) { return Mat2{0, 1, 0, -3 * v.y * v.y + mu}; };
    return m;
  };
  return fam;
}

// ---------------------------------------------------------------------------

Orbit iterate(const PlanarMap& map, Vec2 start, long steps, double bailout, bool keep_points) {
  if (steps < 0) throw std::invalid_argument("iterate: steps must be nonnegative");
  Orbit o;
  if (keep_points) o.points.reserve(static_cast<std::size_t>(steps));
  Vec2 p = start;
  o.last = p;
  for (long i = 0; i < steps; ++i) {
    p = map(p);
    if (!p.finite()) {
      o.non_finite = true;
      break;
    }
    if (p.norm() > bailout) {
      o.escaped = true;
      break;
    }
    if (keep_points) o.points.push_back(p);
    o.last = p;
    ++o.steps_completed;
  }
  return o;
}

std::string to_string(Spectrum s) {
  switch (s) {
    case Spectrum::saddle: return "saddle";
    case Spectrum::sink: return "sink";
    case Spectrum::source: return "source";
    case Spectrum::non_hyperbolic: return "non_hyperbolic";
    case Spectrum::complex_pair: return "complex_pair";
  }
  return "unknown";
}

SaddlePoint classify_point(const PlanarMap& map, Vec2 location, int period) {
  SaddlePoint s;
  s.location = location;
  s.period = period;
  s.residual = distance(map.power(location, period), location);
  s.eigen = eigen(map.power_jacobian(location, period));
  if (!s.eigen.real) {
    s.spectrum = Spectrum::complex_pair;
    s.eigenvalues = {std::abs(s.eigen.values[0]), std::abs(s.eigen.values[1])};
    return s;
  }
  const double l0 = s.eigen.values[0].real(), l1 = s.eigen.values[1].real();
  s.eigenvalues = {l0, l1};
  s.eigenvectors = s.eigen.vectors;
  const double m0 = std::abs(l0), m1 = std::abs(l1);
  if (m0 > 1 && m1 < 1) s.spectrum = Spectrum::saddle;
  else if (m0 < 1) s.spectrum = Spectrum::sink;
  else if (m1 > 1) s.spectrum = Spectrum::source;
  else s.spectrum = Spectrum::non_hyperbolic;
  return s;
}

SaddleSearch find_saddle(const PlanarMap& map, int period, Vec2 seed, double tol, int max_iter) {
  if (period < 1) throw std::invalid_argument("find_saddle: period must be positive");
  SaddleSearch r;
  Vec2 z = seed;
  for (int it = 1; it <= max_iter; ++it) {
    r.iterations = it;
    Vec2 g = map.power(z, period) - z;
    r.residual = g.norm();
    r.last_iterate = z;
    if (!g.finite()) {
      r.diagnostic = "non-finite image during Newton iteration";
      return r;
    }
    if (r.residual <= tol * std::max(1.0, z.norm())) {
      r.converged = true;
      break;
    }
    Mat2 dg = map.power_jacobian(z, period) - Mat2::identity();
    if (dg.det() == 0.0) {
      r.diagnostic = "singular Newton matrix";
      return r;
    }
    Vec2 step = dg.inverse() * g;
    z -= step;
    if (!z.finite() || z.norm() > 1e8) {
      r.last_iterate = z;
      r.diagnostic = "Newton iterate diverged";
      return r;
    }
    if (step.norm() <= tol * 1e-3 * std::max(1.0, z.norm())) {
      r.residual = (map.power(z, period) - z).norm();
      r.last_iterate = z;
      r.converged = r.residual <= 1e3 * tol * std::max(1.0, z.norm());
      break;
    }
  }
  if (!r.converged) {
    if (r.diagnostic.empty())
      r.diagnostic = "Newton did not converge in " + std::to_string(max_iter) + " iterations";
    return r;
  }
  r.last_iterate = z;
  r.point = classify_point(map, z, period);
  return r;
}

namespace {

bool lex_less(const Vec2& a, const Vec2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

}  // namespace

std::vector<SaddlePoint> find_periodic_points(const PlanarMap& map, int period, const Box2& box, int grid,
                                              double tol, unsigned threads) {
  if (grid < 2) throw std::invalid_argument("find_periodic_points: grid must be at least 2");
  const std::size_t n = static_cast<std::size_t>(grid) * static_cast<std::size_t>(grid);
  std::vector<std::optional<SaddlePoint>> slots(n);
  parallel_for(n, threads, [&](std::size_t k) {
    const double i = static_cast<double>(k % grid), j = static_cast<double>(k / grid);
    Vec2 seed{box.x_lo + box.width() * i / (grid - 1), box.y_lo + box.height() * j / (grid - 1)};
    SaddleSearch s = find_saddle(map, period, seed, tol);
    if (!s.converged || !box.contains(s.point->location)) return;
    for (int d = 1; d < period; ++d) {
      if (period % d == 0 && distance(map.power(s.point->location, d), s.point->location) < 1e-8) return;
    }
    // Represent the orbit by its lexicographically smallest point.
    Vec2 best = s.point->location, q = best;
    for (int step = 1; step < period; ++step) {
      q = map(q);
      if (lex_less(q, best)) best = q;
    }
    slots[k] = best == s.point->location ? *s.point : classify_point(map, best, period);
  });
  std::vector<SaddlePoint> found;
  for (auto& s : slots)
    if (s) found.push_back(std::move(*s));
  std::sort(found.begin(), found.end(),
            [](const SaddlePoint& a, const SaddlePoint& b) { return lex_less(a.location, b.location); });
  std::vector<SaddlePoint> unique;
  for (auto& s : found) {
    bool dup = std::any_of(unique.begin(), unique.end(),
                           [&](const SaddlePoint& u) { return distance(u.location, s.location) < 1e-8; });
    if (!dup) unique.push_back(std::move(s));
  }
  return unique;
}

LyapunovEstimate lyapunov(const PlanarMap& map, Vec2 start, long steps, long discard, double bailout) {
  if (steps < 10000) throw std::invalid_argument("lyapunov: at least 10^4 steps are required");
  if (discard < 0) throw std::invalid_argument("lyapunov: discard must be nonnegative");
  LyapunovEstimate est;
  Vec2 p = start;
  Vec2 v{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  const long quarter_start = discard + steps - steps / 4;
  double sum = 0.0, quarter_sum = 0.0;
  for (long i = 0; i < discard + steps; ++i) {
    Vec2 w = map.jacobian_at(p) * v;
    const double r = w.norm();
    p = map(p);
    if (!p.finite() || p.norm() > bailout || !(r > 0) || !std::isfinite(r)) {
      est.bounded = false;
      est.steps = std::max(0L, i - discard);
      est.final_point = p;
      return est;
    }
    v = w / r;
    if (i >= discard) {
      const double lr = std::log(r);
      sum += lr;
      if (i >= quarter_start) quarter_sum += lr;
    }
  }
  est.steps = steps;
  est.exponent = sum / static_cast<double>(steps);
  est.last_quarter = quarter_sum / static_cast<double>(steps / 4);
  est.drift = std::abs(est.last_quarter - est.exponent);
  est.final_point = p;
  return est;
}

nlohmann::json to_json(const SaddlePoint& s) {
  return {{"location", {s.location.x, s.location.y}},
          {"period", s.period},
          {"eigenvalues", {s.eigenvalues[0], s.eigenvalues[1]}},
          {"eigenvectors", {{s.eigenvectors[0].x, s.eigenvectors[0].y}, {s.eigenvectors[1].x, s.eigenvectors[1].y}}},
          {"spectrum", to_string(s.spectrum)},
          {"residual", s.residual}};
}

nlohmann::json to_json(const LyapunovEstimate& l) {
  return {{"bounded", l.bounded}, {"exponent", l.exponent}, {"last_quarter", l.last_quarter},
          {"drift", l.drift},     {"steps", l.steps},       {"final_point", {l.final_point.x, l.final_point.y}}};
}

}  // namespace cubiclab::planar
