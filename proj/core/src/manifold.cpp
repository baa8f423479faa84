#include "cubiclab/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace cubiclab::manifold {

std::string to_string(Kind k) { return k == Kind::stable ? "stable" : "unstable"; }

namespace {

struct PeriodMap {
  const planar::PlanarMap* map;
  bool use_inverse;
  int reps;

  Vec2 operator()(Vec2 p) const {
    for (int i = 0; i < reps; ++i) p = use_inverse ? map->inverse(p) : map->forward(p);
    return p;
  }
};

struct Setup {
  PeriodMap step;
  double multiplier;  // Lambda > 1
  Vec2 direction;
  double d;
};

Setup setup(const planar::PlanarMap& map, const planar::SaddlePoint& saddle, Kind kind, int side,
            const GrowthControls& controls) {
  if (!saddle.is_saddle()) throw std::invalid_argument("grow_manifold: base point is not a saddle");
  if (kind == Kind::stable && !map.has_inverse())
    throw std::invalid_argument("grow_manifold: stable manifold requires an inverse map");
  const double ev = kind == Kind::unstable ? saddle.eigenvalues[0] : saddle.eigenvalues[1];
  const bool flip = ev < 0;
  const int reps = saddle.period * (flip ? 2 : 1);
  double lambda = std::abs(ev);
  if (kind == Kind::stable) lambda = 1.0 / lambda;
  if (flip) lambda *= lambda;
  Vec2 v = kind == Kind::unstable ? saddle.unstable_direction() : saddle.stable_direction();
  if (side < 0) v = -v;
  const double d = std::min(controls.seed_distance, 1e-5 / lambda);
  return {{&map, kind == Kind::stable, reps}, lambda, v, d};
}

}  // namespace

ManifoldCurve grow_manifold(const planar::PlanarMap& map, const planar::SaddlePoint& saddle, Kind kind,
                            double target_arclength, int side, const GrowthControls& controls,
                            const std::function<bool(const Vec2&)>& stop) {
  const Setup su = setup(map, saddle, kind, side, controls);
  const Vec2 P = saddle.location;
  auto gamma = [&](double s) {
    const double k = std::floor(s);
    Vec2 p = P + su.d * std::pow(su.multiplier, s - k) * su.direction;
    for (long i = 0; i < static_cast<long>(k); ++i) p = su.step(p);
    return p;
  };

  ManifoldCurve c;
  c.kind = kind;
  c.base = saddle;
  c.side = side < 0 ? -1 : 1;
  c.points.push_back(P);
  c.arclength.push_back(0.0);
  c.parameter.push_back(-std::numeric_limits<double>::infinity());

  constexpr double s_limit = 400.0;
  double s = 0.0, ds = 1.0 / 16.0, length = 0.0;
  Vec2 last = P, last_dir;
  bool have_dir = false;
  while (length < target_arclength) {
    if (c.points.size() >= controls.budget) {
      c.truncated = true;
      c.stop_reason = "point budget exhausted";
      break;
    }
    if (s > s_limit) {
      c.truncated = true;
      c.stop_reason = "fundamental-domain parameter limit reached";
      break;
    }
    const double st = s + ds;
    const Vec2 q = gamma(st);
    if (!q.finite()) {
      c.truncated = true;
      c.stop_reason = "non-finite point";
      break;
    }
    const Vec2 seg = q - last;
    const double l = seg.norm();
    const double ang = have_dir && l > 0 ? std::atan2(std::abs(cross(last_dir, seg)), dot(last_dir, seg)) : 0.0;
    if (l > controls.h_max || (ang > controls.angle_max && l > controls.h_min)) {
      ds *= 0.5;
      if (ds < 1e-14) {
        c.truncated = true;
        c.stop_reason = "parameter step underflow";
        break;
      }
      continue;
    }
    s = st;
    if (l >= controls.h_min) {
      length += l;
      c.points.push_back(q);
      c.arclength.push_back(length);
      c.parameter.push_back(s);
      last_dir = seg / l;
      last = q;
      have_dir = true;
      if (stop && stop(q)) {
        c.stopped = true;
        c.stop_reason = "stop predicate";
        break;
      }
    }
    if (l < 0.5 * controls.h_max && ang < 0.5 * controls.angle_max) ds = std::min(1.5 * ds, 1.0);
  }
  if (c.stop_reason.empty()) c.stop_reason = "target arclength reached";
  return c;
}

namespace {

double segment_distance(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 ab = b - a;
  const double L2 = dot(ab, ab);
  double t = L2 > 0 ? dot(p - a, ab) / L2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(a + t * ab, p);
}

}  // namespace

double distance_to_polyline(const std::vector<Vec2>& polyline, const Vec2& p) {
  if (polyline.empty()) return std::numeric_limits<double>::infinity();
  if (polyline.size() == 1) return distance(polyline[0], p);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < polyline.size(); ++i) best = std::min(best, segment_distance(polyline[i - 1], polyline[i], p));
  return best;
}

double invariance_defect(const planar::PlanarMap& map, const ManifoldCurve& curve, std::size_t stride) {
  if (stride == 0) stride = 1;
  const Setup su = setup(map, curve.base, curve.kind, curve.side, GrowthControls{});
  const auto& par = curve.parameter;
  const auto& pts = curve.points;
  double worst = 0.0;
  for (std::size_t i = 1; i < pts.size(); i += stride) {
    const double target = par[i] + 1.0;
    if (target > par.back()) break;
    const Vec2 img = su.step(pts[i]);
    auto it = std::lower_bound(par.begin() + 1, par.end(), target);
    const std::size_t j = static_cast<std::size_t>(it - par.begin());
    double best = std::numeric_limits<double>::infinity();
    const std::size_t lo = j > 4 ? j - 4 : 1, hi = std::min(pts.size() - 1, j + 4);
    for (std::size_t k = lo; k <= hi; ++k) best = std::min(best, segment_distance(pts[k - 1], pts[k], img));
    worst = std::max(worst, best);
  }
  return worst;
}

void write_polyline_csv(std::ostream& os, const std::vector<Vec2>& points) {
  os << "x,y\n";
  os.precision(17);
  for (const auto& p : points) os << p.x << ',' << p.y << '\n';
}

}  // namespace cubiclab::manifold
