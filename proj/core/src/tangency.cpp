#include "cubiclab/tangency.hpp"

#include "cubiclab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cubiclab::tangency {

std::string to_string(Extremum e) { return e == Extremum::local_max ? "local_max" : "local_min"; }

std::string to_string(Classification c) {
  switch (c) {
    case Classification::contact_making: return "contact_making";
    case Classification::contact_breaking: return "contact_breaking";
    case Classification::transverse: return "transverse";
    case Classification::withheld: return "withheld";
  }
  return "unknown";
}

namespace {

struct Projected {
  double u0, v0, u1, v1;
};

std::vector<Projected> candidate_segments(const std::vector<Vec2>& curve, const Box2& window, const Vec2& e,
                                          const Vec2& d) {
  std::vector<Projected> out;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const Vec2& a = curve[i - 1];
    const Vec2& b = curve[i];
    if (std::max(a.x, b.x) < window.x_lo || std::min(a.x, b.x) > window.x_hi || std::max(a.y, b.y) < window.y_lo ||
        std::min(a.y, b.y) > window.y_hi)
      continue;
    out.push_back({dot(a, e), dot(a, d), dot(b, e), dot(b, d)});
  }
  return out;
}

/// Fiber intersections inside the window.
std::vector<double> fiber_hits(const std::vector<Projected>& segs, double u, const Box2& window, const Vec2& e,
                               const Vec2& d) {
  std::vector<double> hits;
  for (const auto& s : segs) {
    const bool in = (s.u0 <= u && u < s.u1) || (s.u1 <= u && u < s.u0);
    if (!in) continue;
    const double v = s.v0 + (u - s.u0) / (s.u1 - s.u0) * (s.v1 - s.v0);
    if (window.contains(u * e + v * d)) hits.push_back(v);
  }
  return hits;
}

}  // namespace

Detection detect_tangencies(const std::vector<Vec2>& unstable, const std::vector<Vec2>& stable, const Box2& window,
                            Vec2 fiber_direction, int fibers) {
  if (fibers < 5) throw std::invalid_argument("detect_tangencies: need at least 5 fibers");
  const double dn = fiber_direction.norm();
  if (!(dn > 0)) throw std::invalid_argument("detect_tangencies: zero fiber direction");
  const Vec2 d = fiber_direction / dn;
  const Vec2 e{d.y, -d.x};

  Detection det;
  double u_lo = 1e300, u_hi = -1e300;
  for (Vec2 c : {Vec2{window.x_lo, window.y_lo}, Vec2{window.x_hi, window.y_lo}, Vec2{window.x_lo, window.y_hi},
                 Vec2{window.x_hi, window.y_hi}}) {
    u_lo = std::min(u_lo, dot(c, e));
    u_hi = std::max(u_hi, dot(c, e));
  }
  const auto su = candidate_segments(unstable, window, e, d);
  const auto ss = candidate_segments(stable, window, e, d);
  const double h = (u_hi - u_lo) / (fibers - 1);

  std::vector<int> index;
  for (int k = 0; k < fibers; ++k) {
    const double u = u_lo + h * k;
    auto hu = fiber_hits(su, u, window, e, d);
    auto hs = fiber_hits(ss, u, window, e, d);
    if (hu.size() > 1 || hs.size() > 1) {
      std::ostringstream os;
      os << "fiber at u = " << u << " meets the " << (hu.size() > 1 ? "unstable" : "stable") << " curve "
         << std::max(hu.size(), hs.size()) << " times";
      det.rejected = true;
      det.diagnostic = os.str();
      det.profile.clear();
      return det;
    }
    if (hu.empty() || hs.empty()) continue;
    det.profile.push_back({u, hu[0], hs[0], hu[0] - hs[0]});
    index.push_back(k);
  }
  const auto& p = det.profile;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (index[i] == index[i - 1] + 1 && ((p[i - 1].gap < 0) != (p[i].gap < 0))) ++det.crossings;
  }
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    if (index[i - 1] + 1 != index[i] || index[i] + 1 != index[i + 1]) continue;
    const double g0 = p[i - 1].gap, g1 = p[i].gap, g2 = p[i + 1].gap;
    const bool is_max = g1 > g0 && g1 >= g2;
    const bool is_min = g1 < g0 && g1 <= g2;
    if (!is_max && !is_min) continue;
    const double second = g0 - 2 * g1 + g2;
    double offset = 0, value = g1;
    if (second != 0) {
      offset = std::clamp(0.5 * (g0 - g2) / second, -1.0, 1.0);
      value = g1 - 0.125 * (g0 - g2) * (g0 - g2) / second;
    }
    GapEvent ev;
    ev.extremum = is_max ? Extremum::local_max : Extremum::local_min;
    ev.fiber_coordinate = p[i].u + offset * h;
    ev.min_gap = value;
    ev.depth = is_max ? value : -value;
    auto lerp = [&](double a, double b, double c) {
      return offset >= 0 ? b + offset * (c - b) : b + offset * (b - a);
    };
    const double v_mid = 0.5 * (lerp(p[i - 1].v_u, p[i].v_u, p[i + 1].v_u) + lerp(p[i - 1].v_s, p[i].v_s, p[i + 1].v_s));
    ev.location = ev.fiber_coordinate * e + v_mid * d;
    ev.curvature_unstable = (p[i - 1].v_u - 2 * p[i].v_u + p[i + 1].v_u) / (h * h);
    ev.curvature_stable = (p[i - 1].v_s - 2 * p[i].v_s + p[i + 1].v_s) / (h * h);
    if (i >= 2 && i + 2 < p.size() && index[i + 2] == index[i] + 2 && index[i - 2] + 2 == index[i]) {
      const double wide_u = (p[i - 2].v_u - 2 * p[i].v_u + p[i + 2].v_u) / (4 * h * h);
      const double wide_s = (p[i - 2].v_s - 2 * p[i].v_s + p[i + 2].v_s) / (4 * h * h);
      ev.curvature_noise = std::abs((ev.curvature_unstable - ev.curvature_stable) - (wide_u - wide_s));
    }
    det.events.push_back(ev);
  }
  return det;
}

// ---------------------------------------------------------------------------

TangencyEvent classify_tangency(const Probe& probe, double t0, double dt, double noise_floor) {
  if (!(dt > 0)) throw std::invalid_argument("classify_tangency: dt must be positive");
  TangencyEvent ev;
  ev.parameter = t0;
  auto at0 = probe(t0);
  if (!at0) {
    ev.note = "event lost at t0";
    return ev;
  }
  ev.location = at0->location;
  ev.min_gap = at0->min_gap;
  ev.depth = at0->depth;
  ev.extremum = at0->extremum;
  ev.curvature_gap = std::abs(at0->curvature_unstable - at0->curvature_stable);
  ev.curvature_noise = at0->curvature_noise;

  std::optional<GapEvent> e[4] = {probe(t0 - dt), probe(t0 + dt), probe(t0 - dt / 2), probe(t0 + dt / 2)};
  for (const auto& x : e) {
    if (!x) {
      ev.note = "event lost within t0 +- dt";
      return ev;
    }
  }
  ev.slope_coarse = (e[1]->depth - e[0]->depth) / (2 * dt);
  ev.slope_fine = (e[3]->depth - e[2]->depth) / dt;
  ev.gap_slope = (4 * ev.slope_fine - ev.slope_coarse) / 3;
  ev.richardson_consistent = std::abs(ev.slope_coarse - ev.slope_fine) <= 0.1 * std::abs(ev.slope_fine);

  const double lo = e[0]->depth, hi = e[1]->depth, mid = at0->depth;
  if ((lo > 0 && mid > 0 && hi > 0) || (lo < 0 && mid < 0 && hi < 0)) {
    ev.classification = Classification::transverse;
    ev.note = "depth keeps one sign across t0 +- dt";
    return ev;
  }
  if (std::abs(ev.gap_slope) < noise_floor) {
    ev.note = "slope below noise floor";
    return ev;
  }
  ev.classification = ev.gap_slope > 0 ? Classification::contact_making : Classification::contact_breaking;
  return ev;
}

// ---------------------------------------------------------------------------

namespace {

double cubic(double mu, double nu, double y) { return -y * y * y + mu * y + nu; }

std::optional<double> period_two_ordinate(double mu, double nu, double seed) {
  double y = seed;
  for (int it = 0; it < 100; ++it) {
    const double f1 = cubic(mu, nu, y), d1 = -3 * y * y + mu;
    const double f2 = cubic(mu, nu, f1), d2 = -3 * f1 * f1 + mu;
    const double g = f2 - y, dg = d2 * d1 - 1;
    if (dg == 0 || !std::isfinite(g)) return std::nullopt;
    const double step = g / dg;
    y -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(y))) return y;
  }
  return std::abs(cubic(mu, nu, cubic(mu, nu, y)) - y) < 1e-12 ? std::optional<double>(y) : std::nullopt;
}

double critical_value(double mu, double nu, int sign) {
  const double c = sign * std::sqrt(mu / 3);
  return cubic(mu, nu, c);
}

}  // namespace

VelocityTable velocity_derivatives(double mu_bar, double nu_bar, double step) {
  VelocityTable t;
  t.mu_bar = mu_bar;
  t.nu_bar = nu_bar;
  t.step = step;
  auto solve = [&](double mu, double nu, double seed) -> double {
    auto y = period_two_ordinate(mu, nu, seed);
    if (!y) {
      t.ok = false;
      std::ostringstream os;
      os << "period-2 solve failed at (" << mu << ", " << nu << ")";
      t.diagnostic = os.str();
      return NAN;
    }
    return *y;
  };
  t.y_plus = solve(mu_bar, nu_bar, 2.0);
  t.y_minus = solve(mu_bar, nu_bar, -2.0);
  if (!t.ok) return t;
  auto dmu = [&](double seed) { return (solve(mu_bar + step, nu_bar, seed) - solve(mu_bar - step, nu_bar, seed)) / (2 * step); };
  auto dnu = [&](double seed) { return (solve(mu_bar, nu_bar + step, seed) - solve(mu_bar, nu_bar - step, seed)) / (2 * step); };
  t.dy_plus_dmu = dmu(t.y_plus);
  t.dy_minus_dmu = dmu(t.y_minus);
  t.dy_plus_dnu = dnu(t.y_plus);
  t.dy_minus_dnu = dnu(t.y_minus);
  if (mu_bar - step <= 0) {
    t.ok = false;
    t.diagnostic = "critical points undefined for mu_bar <= 0";
    return t;
  }
  for (int s : {1, -1}) {
    const double dm = (critical_value(mu_bar + step, nu_bar, s) - critical_value(mu_bar - step, nu_bar, s)) / (2 * step);
    const double dn = (critical_value(mu_bar, nu_bar + step, s) - critical_value(mu_bar, nu_bar - step, s)) / (2 * step);
    (s > 0 ? t.dFc_plus_dmu : t.dFc_minus_dmu) = dm;
    (s > 0 ? t.dFc_plus_dnu : t.dFc_minus_dnu) = dn;
  }
  return t;
}

// ---------------------------------------------------------------------------

TangencyExperiment::TangencyExperiment(ExperimentConfig config) : config_(std::move(config)) {
  config_.model.validate();
  if (config_.n < 1) throw std::invalid_argument("tangency experiment requires n >= 1");
  renorm::ResidualOptions o;
  o.grid = 21;
  o.parameter_grid = 3;
  residual_ = renorm::residual_norm(config_.model, config_.n, o).sup();
}

planar::PlanarMap TangencyExperiment::map(double mu_bar, double nu_bar) const {
  return renorm::RenormalizedMap(config_.model, config_.n, mu_bar, nu_bar).as_planar();
}

PeriodTwoPair TangencyExperiment::saddles(double mu_bar, double nu_bar) const {
  const auto m = map(mu_bar, nu_bar);
  auto solve = [&](Vec2 seed, const char* name) {
    auto s = planar::find_saddle(m, 2, seed, 1e-13);
    if (!s.converged) throw std::runtime_error(std::string(name) + ": " + s.diagnostic);
    if (!s.point->is_saddle()) throw std::runtime_error(std::string(name) + " is not a saddle");
    return *s.point;
  };
  return {solve({-2, 2}, "P+"), solve({2, -2}, "P-")};
}

manifold::ManifoldCurve TangencyExperiment::unstable_plus(double mu_bar, double nu_bar) const {
  const auto m = map(mu_bar, nu_bar);
  const auto pair = saddles(mu_bar, nu_bar);
  // The branch heading toward increasing x first dips to the cubic's minimum,
  // then passes its maximum.
  const int side = pair.plus.unstable_direction().x > 0 ? 1 : -1;
  const double reach = config_.reach;
  return manifold::grow_manifold(m, pair.plus, manifold::Kind::unstable, 40.0, side, config_.controls,
                                 [reach](const Vec2& p) { return p.x > reach; });
}

manifold::ManifoldCurve TangencyExperiment::stable_plus(double mu_bar, double nu_bar) const {
  const auto m = map(mu_bar, nu_bar);
  const auto pair = saddles(mu_bar, nu_bar);
  const int side = pair.plus.stable_direction().x > 0 ? 1 : -1;
  const double reach = config_.reach;
  return manifold::grow_manifold(m, pair.plus, manifold::Kind::stable, 10.0, side, config_.controls,
                                 [reach](const Vec2& p) { return p.x > reach; });
}

manifold::ManifoldCurve TangencyExperiment::stable_minus(double mu_bar, double nu_bar) const {
  const auto m = map(mu_bar, nu_bar);
  const auto pair = saddles(mu_bar, nu_bar);
  const int side = pair.minus.stable_direction().x < 0 ? 1 : -1;
  const double reach = config_.reach;
  return manifold::grow_manifold(m, pair.minus, manifold::Kind::stable, 10.0, side, config_.controls,
                                 [reach](const Vec2& p) { return p.x < -reach; });
}

namespace {

std::optional<GapEvent> pick(const Detection& d, Extremum want, const Box2& window) {
  if (d.rejected) return std::nullopt;
  std::optional<GapEvent> best;
  const double cx = 0.5 * (window.x_lo + window.x_hi);
  for (const auto& e : d.events) {
    if (e.extremum != want) continue;
    // Most prominent extremum; ties resolved toward the window center.
    if (!best || e.depth > best->depth ||
        (e.depth == best->depth && std::abs(e.location.x - cx) < std::abs(best->location.x - cx)))
      best = e;
  }
  return best;
}

}  // namespace

std::optional<GapEvent> TangencyExperiment::upper(double mu_bar, double nu_bar) const {
  try {
    auto wu = unstable_plus(mu_bar, nu_bar);
    auto ws = stable_plus(mu_bar, nu_bar);
    return pick(detect_tangencies(wu.points, ws.points, config_.upper_window, {0, 1}, config_.fibers),
                Extremum::local_max, config_.upper_window);
  } catch (const std::runtime_error&) {
    return std::nullopt;
  }
}

std::optional<GapEvent> TangencyExperiment::lower(double mu_bar, double nu_bar) const {
  try {
    auto wu = unstable_plus(mu_bar, nu_bar);
    auto ws = stable_minus(mu_bar, nu_bar);
    return pick(detect_tangencies(wu.points, ws.points, config_.lower_window, {0, 1}, config_.fibers),
                Extremum::local_min, config_.lower_window);
  } catch (const std::runtime_error&) {
    return std::nullopt;
  }
}

std::optional<GapEvent> TangencyExperiment::upper_frozen_unstable(double mu0, double nu0, double mu_bar,
                                                                  double nu_bar) const {
  try {
    auto wu = unstable_plus(mu0, nu0);
    auto ws = stable_plus(mu_bar, nu_bar);
    return pick(detect_tangencies(wu.points, ws.points, config_.upper_window, {0, 1}, config_.fibers),
                Extremum::local_max, config_.upper_window);
  } catch (const std::runtime_error&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------

namespace {

using DepthFn = std::function<std::optional<double>(double)>;

/// Root of a depth function in [lo, hi] given opposite signs at the ends.
std::optional<double> bisect(const DepthFn& f, double lo, double hi, double flo, double tol = 1e-9) {
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    auto fm = f(mid);
    if (!fm) return std::nullopt;
    if ((*fm > 0) == (flo > 0)) {
      lo = mid;
      flo = *fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ScanResult scan(const TangencyExperiment& ex, double mu_bar, double nu_bar, double t_lo, double t_hi, int samples,
                unsigned threads) {
  ScanResult r;
  r.mu_bar = mu_bar;
  r.nu_bar = nu_bar;
  if (samples <= 0 || t_hi < t_lo) return r;
  r.rows.resize(static_cast<std::size_t>(samples));
  parallel_for(r.rows.size(), threads, [&](std::size_t k) {
    const double t = samples == 1 ? t_lo : t_lo + (t_hi - t_lo) * static_cast<double>(k) / (samples - 1);
    ScanRow row;
    row.t = t;
    if (auto u = ex.upper(mu_bar, nu_bar + t)) row.upper_depth = u->depth;
    if (auto l = ex.lower(mu_bar, nu_bar + t)) row.lower_depth = l->depth;
    r.rows[k] = row;
  });

  const double dt = ex.config().dt, floor = ex.config().noise_floor;
  for (int region = 0; region < 2; ++region) {
    auto depth_of = [&](const ScanRow& row) { return region == 0 ? row.upper_depth : row.lower_depth; };
    Probe probe = [&, region](double t) {
      return region == 0 ? ex.upper(mu_bar, nu_bar + t) : ex.lower(mu_bar, nu_bar + t);
    };
    DepthFn depth = [&](double t) -> std::optional<double> {
      auto e = probe(t);
      return e ? std::optional<double>(e->depth) : std::nullopt;
    };
    for (std::size_t k = 1; k < r.rows.size(); ++k) {
      auto a = depth_of(r.rows[k - 1]), b = depth_of(r.rows[k]);
      if (!a || !b || (*a > 0) == (*b > 0)) continue;
      auto t0 = bisect(depth, r.rows[k - 1].t, r.rows[k].t, *a);
      if (!t0) continue;
      r.events.push_back(classify_tangency(probe, *t0, dt, floor));
      r.region.push_back(region == 0 ? "upper" : "lower");
    }
  }
  return r;
}

LocusFit f_bar_slope(const TangencyExperiment& ex, const std::vector<double>& mu_grid, double nu_lo, double nu_hi,
                     unsigned threads, std::optional<std::pair<double, double>> frozen) {
  std::vector<std::optional<double>> roots(mu_grid.size());
  parallel_for(mu_grid.size(), threads, [&](std::size_t k) {
    const double mu = mu_grid[k];
    DepthFn depth = [&](double nu) -> std::optional<double> {
      auto e = frozen ? ex.upper_frozen_unstable(frozen->first, frozen->second, mu, nu) : ex.upper(mu, nu);
      return e ? std::optional<double>(e->depth) : std::nullopt;
    };
    auto a = depth(nu_lo), b = depth(nu_hi);
    if (!a || !b || (*a > 0) == (*b > 0)) return;
    roots[k] = bisect(depth, nu_lo, nu_hi, *a, 1e-10);
  });
  LocusFit fit;
  for (std::size_t k = 0; k < mu_grid.size(); ++k) {
    if (roots[k]) {
      fit.mu_bar.push_back(mu_grid[k]);
      fit.nu_bar.push_back(*roots[k]);
    } else {
      fit.skipped.push_back(mu_grid[k]);
    }
  }
  const std::size_t m = fit.mu_bar.size();
  if (m >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
      sx += fit.mu_bar[i];
      sy += fit.nu_bar[i];
      sxx += fit.mu_bar[i] * fit.mu_bar[i];
      sxy += fit.mu_bar[i] * fit.nu_bar[i];
    }
    fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.strictly_decreasing = true;
    for (std::size_t i = 1; i < m; ++i)
      if (!(fit.nu_bar[i] < fit.nu_bar[i - 1])) fit.strictly_decreasing = false;
  }
  return fit;
}

void write_events_csv(std::ostream& os, const ScanResult& r) {
  os << "t,region,x,y,min_gap,gap_slope,classification\n";
  os.precision(12);
  for (std::size_t i = 0; i < r.events.size(); ++i) {
    const auto& e = r.events[i];
    os << e.parameter << ',' << r.region[i] << ',' << e.location.x << ',' << e.location.y << ',' << e.min_gap << ','
       << e.gap_slope << ',' << to_string(e.classification) << '\n';
  }
}

nlohmann::json to_json(const TangencyEvent& e) {
  return {{"parameter", e.parameter},
          {"location", {e.location.x, e.location.y}},
          {"min_gap", e.min_gap},
          {"depth", e.depth},
          {"extremum", to_string(e.extremum)},
          {"gap_slope", e.gap_slope},
          {"slope_coarse", e.slope_coarse},
          {"slope_fine", e.slope_fine},
          {"richardson_consistent", e.richardson_consistent},
          {"curvature_gap", e.curvature_gap},
          {"curvature_noise", e.curvature_noise},
          {"classification", to_string(e.classification)},
          {"note", e.note}};
}

nlohmann::json to_json(const VelocityTable& v) {
  return {{"mu_bar", v.mu_bar},
          {"nu_bar", v.nu_bar},
          {"step", v.step},
          {"y_plus", v.y_plus},
          {"y_minus", v.y_minus},
          {"dy_plus_dmu", v.dy_plus_dmu},
          {"dy_minus_dmu", v.dy_minus_dmu},
          {"dy_plus_dnu", v.dy_plus_dnu},
          {"dy_minus_dnu", v.dy_minus_dnu},
          {"dFc_plus_dmu", v.dFc_plus_dmu},
          {"dFc_minus_dmu", v.dFc_minus_dmu},
          {"dFc_plus_dnu", v.dFc_plus_dnu},
          {"dFc_minus_dnu", v.dFc_minus_dnu},
          {"ok", v.ok},
          {"diagnostic", v.diagnostic}};
}

nlohmann::json to_json(const LocusFit& f) {
  return {{"mu_bar", f.mu_bar}, {"nu_bar", f.nu_bar}, {"skipped", f.skipped}, {"slope", f.slope},
          {"strictly_decreasing", f.strictly_decreasing}};
}

}  // namespace cubiclab::tangency
