#include "cubiclab/acceptance.hpp"

#include "cubiclab/cantor.hpp"
#include "cubiclab/maps1d.hpp"
#include "cubiclab/parallel.hpp"
#include "cubiclab/planar.hpp"
#include "cubiclab/renorm.hpp"
#include "cubiclab/report.hpp"
#include "cubiclab/tangency.hpp"
#include "cubiclab/wangyoung.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

namespace cubiclab::acceptance {

namespace {

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

std::string fmt(const Rational& q) { return cubiclab::to_string(q) + " (" + fmt(to_double(q)) + ")"; }

class Ctx {
 public:
  Ctx(const Options& o, CriterionResult& r) : opts(o), result(r) {
    merged = default_constants();
    for (const auto& [k, v] : o.constants.items()) merged[k] = v;
  }

  double num(const std::string& key) const { return merged.at(key).get<double>(); }
  long integer(const std::string& key) const { return merged.at(key).get<long>(); }
  Rational rational(const std::string& key) const {
    const auto& v = merged.at(key);
    return v.is_string() ? parse_rational(v.get<std::string>()) : parse_rational(fmt(v.get<double>(), 17));
  }

  bool check(bool ok, const std::string& line) {
    result.details.push_back(std::string(ok ? "ok    " : "FAIL  ") + line);
    if (!ok && result.failure.empty()) result.failure = line;
    return ok;
  }

  const Options& opts;
  CriterionResult& result;
  nlohmann::json merged;
};

// ---------------------------------------------------------------------------

void run_cantor(Ctx& ctx) {
  using namespace cantor;
  const int gens = static_cast<int>(ctx.integer("cantor.generations"));
  std::map<int, KmConstruction> km;
  nlohmann::json table = nlohmann::json::array();
  for (int m : {6, 8, 10}) km.emplace(m, construct_km(m, gens));

  const auto& k6 = km.at(6);
  ctx.check(k6.q0 == ctx.rational("cantor.q0"), "q0 for m=6 is " + cubiclab::to_string(k6.q0));
  ctx.check(k6.quoted_thickness_bound() == ctx.rational("cantor.bound_m6"),
            "(3^6-45)/22 = " + cubiclab::to_string(k6.quoted_thickness_bound()));

  for (auto& [m, c] : km) {
    // Nested generations, each mapped by S into the previous one, and equal to
    // the generation produced by the Markov branch system.
    bool nested = true, forward = true, markov = true;
    const auto system = km_branch_system(c);
    for (int g = 1; g <= gens; ++g) {
      const auto& cur = c.generations[g - 1];
      cur.validate();
      auto mk = markov_cantor(system, g);
      if (!mk.ok() || mk.set->intervals != cur.intervals) markov = false;
      if (g == 1) continue;
      const auto& prev = c.generations[g - 2];
      for (const auto& iv : cur.intervals) {
        auto inside = [&](const Rational& x) {
          return std::any_of(prev.intervals.begin(), prev.intervals.end(),
                             [&](const auto& p) { return p.contains(x); });
        };
        if (!inside(iv.lo) || !inside(iv.hi)) nested = false;
        if (!inside(maps1d::NMap::eval(iv.lo)) || !inside(maps1d::NMap::eval(iv.hi))) forward = false;
      }
    }
    ctx.check(nested && forward && markov,
              "m=" + std::to_string(m) + " generations nested, S-forward invariant, equal to Markov construction");

    const Rational bound = c.quoted_thickness_bound();
    nlohmann::json row{{"m", m}, {"bound", cubiclab::to_string(bound)}, {"q0", cubiclab::to_string(c.q0)},
                       {"realized_gap", cubiclab::to_string(c.realized_gap())},
                       {"quoted_gap", cubiclab::to_string(c.quoted_gap())}};
    nlohmann::json taus = nlohmann::json::array();
    for (int g = 1; g <= gens; ++g) {
      const auto t = thickness(c.generations[g - 1]).thickness;
      taus.push_back(cubiclab::to_string(t));
      ctx.check(t >= bound, "m=" + std::to_string(m) + " g=" + std::to_string(g) + " thickness " + fmt(t) +
                                " >= bound " + fmt(bound));
    }
    row["thickness"] = taus;
    table.push_back(row);
  }

  for (int g = 1; g <= gens; ++g) {
    const auto t6 = thickness(km.at(6).generations[g - 1]).thickness;
    const auto t8 = thickness(km.at(8).generations[g - 1]).thickness;
    const auto t10 = thickness(km.at(10).generations[g - 1]).thickness;
    ctx.check(t6 < t8 && t8 < t10, "g=" + std::to_string(g) + " thickness increasing in m: " + fmt(to_double(t6)) +
                                       " < " + fmt(to_double(t8)) + " < " + fmt(to_double(t10)));
  }
  ctx.result.data["constructions"] = table;
}

void run_conjugacy(Ctx& ctx) {
  const long n = ctx.integer("conjugacy.grid");
  double sup = 0, arg = 0;
  for (long i = 0; i < n; ++i) {
    const double x = -1.5 + 3.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    const double d = maps1d::conjugacy_defect(x);
    if (d > sup) sup = d, arg = x;
  }
  ctx.check(sup < ctx.num("conjugacy.tolerance"),
            "sup |h(S(x)) - F(h(x))| over " + std::to_string(n) + " points = " + fmt(sup, 3) + " at x=" + fmt(arg));
  ctx.result.data = {{"grid", n}, {"sup_defect", sup}, {"argmax", arg}};
}

void run_renorm(Ctx& ctx) {
  renorm::ModelParams p;
  renorm::ResidualOptions opts;
  opts.threads = ctx.opts.threads;
  const double rel_tol = ctx.num("renorm.relative_tolerance");
  const double ls = p.lambda * p.sigma;
  double worst = 0;
  int worst_n = 0;
  for (int n = 1; n <= 14; ++n) {
    const auto r = renorm::residual_norm(p, n, opts);
    const double expected = ctx.num("renorm.closed_form_factor") * std::abs(p.a * p.c) * std::pow(ls, n);
    const double rel = std::abs(r.sup_h2 - expected) / expected;
    if (rel >= worst) worst = rel, worst_n = n;
  }
  ctx.check(worst < rel_tol, "unperturbed sup|H2| = 2(lambda sigma)^n for n=1..14, worst relative error " +
                                 fmt(worst, 3) + " at n=" + std::to_string(worst_n));
  ctx.result.data["closed_form_worst_relative"] = worst;

  nlohmann::json fits = nlohmann::json::array();
  for (double eps : {0.1, 1.0}) {
    auto q = p;
    q.perturbation.kind = renorm::Perturbation::Kind::quartic;
    q.perturbation.epsilon = eps;
    const auto f = renorm::fit_decay(q, 4, 14, opts);
    const double target = std::log(ctx.num("renorm.xi"));
    ctx.check(std::abs(f.slope - target) <= ctx.num("renorm.rate_tolerance"),
              "quartic eps=" + fmt(eps) + " log-residual slope " + fmt(f.slope) + " vs log xi " + fmt(target));
    fits.push_back({{"epsilon", eps}, {"slope", f.slope}, {"log_xi", target}});
  }
  ctx.result.data["quartic_fits"] = fits;
}

void run_velocity(Ctx& ctx) {
  const auto v = tangency::velocity_derivatives(3.0, 0.0, 1e-5);
  ctx.check(v.ok, "period-2 ordinates found: " + fmt(v.y_plus) + ", " + fmt(v.y_minus));
  const double t1 = ctx.num("velocity.tolerance_orbit");
  const double t2 = ctx.num("velocity.tolerance_critical");
  const double dmu = ctx.num("velocity.dy_dmu"), dnu = ctx.num("velocity.dy_dnu"), dfc = ctx.num("velocity.dFc_dmu");
  ctx.check(std::abs(v.dy_plus_dmu - dmu) < t1 && std::abs(v.dy_minus_dmu + dmu) < t1,
            "dy+/dmu = " + fmt(v.dy_plus_dmu, 10) + ", dy-/dmu = " + fmt(v.dy_minus_dmu, 10));
  ctx.check(std::abs(v.dy_plus_dnu - dnu) < t1 && std::abs(v.dy_minus_dnu - dnu) < t1,
            "dy+/dnu = " + fmt(v.dy_plus_dnu, 10) + ", dy-/dnu = " + fmt(v.dy_minus_dnu, 10));
  ctx.check(std::abs(v.dFc_plus_dmu - dfc) < t2 && std::abs(v.dFc_minus_dmu + dfc) < t2,
            "dF(c+)/dmu = " + fmt(v.dFc_plus_dmu, 10) + ", dF(c-)/dmu = " + fmt(v.dFc_minus_dmu, 10));
  ctx.result.data = tangency::to_json(v);
}

void run_tangency(Ctx& ctx) {
  tangency::ExperimentConfig cfg;
  cfg.n = static_cast<int>(ctx.integer("tangency.n"));
  tangency::TangencyExperiment ex(cfg);
  const double coupling = ex.coupling();
  const double residual = ex.measured_residual();
  ctx.check(coupling <= ctx.num("tangency.max_coupling"),
            "n=" + std::to_string(cfg.n) + " coupling (lambda sigma)^n = " + fmt(coupling));

  const auto sr = tangency::scan(ex, 3.0, 0.0, -0.1, 0.1, 9, ctx.opts.threads);
  const tangency::TangencyEvent* up = nullptr;
  const tangency::TangencyEvent* lo = nullptr;
  for (std::size_t i = 0; i < sr.events.size(); ++i) {
    if (sr.region[i] == "upper" && !up) up = &sr.events[i];
    if (sr.region[i] == "lower" && !lo) lo = &sr.events[i];
  }
  const double band = ctx.num("tangency.slope_band") + residual;
  const double target = ctx.num("tangency.upper_slope");
  if (ctx.check(up != nullptr, "upper event found in t in [-0.1, 0.1]")) {
    ctx.check(up->classification == tangency::Classification::contact_making,
              "upper event at t=" + fmt(up->parameter) + " is " + tangency::to_string(up->classification));
    ctx.check(std::abs(up->gap_slope - target) <= band,
              "upper gap slope " + fmt(up->gap_slope) + " in " + fmt(target) + " +- " + fmt(band));
  }
  if (ctx.check(lo != nullptr, "lower event found in t in [-0.1, 0.1]")) {
    ctx.check(lo->classification == tangency::Classification::contact_breaking && lo->gap_slope < 0,
              "lower event at t=" + fmt(lo->parameter) + " is " + tangency::to_string(lo->classification) +
                  " with slope " + fmt(lo->gap_slope));
  }

  std::vector<double> grid;
  for (int i = -3; i <= 3; ++i) grid.push_back(3.0 + 0.02 * i);
  const auto locus = tangency::f_bar_slope(ex, grid, -0.1, 0.1, ctx.opts.threads);
  const double ls = ctx.num("tangency.locus_slope");
  ctx.check(locus.skipped.empty() && std::abs(locus.slope - ls) <= ctx.num("tangency.locus_band"),
            "locus slope " + fmt(locus.slope) + " in " + fmt(ls) + " +- " + fmt(ctx.num("tangency.locus_band")) +
                " over " + std::to_string(locus.mu_bar.size()) + " points");
  ctx.check(locus.strictly_decreasing, "locus strictly decreasing");

  nlohmann::json events = nlohmann::json::array();
  for (std::size_t i = 0; i < sr.events.size(); ++i) {
    auto j = tangency::to_json(sr.events[i]);
    j["region"] = sr.region[i];
    events.push_back(j);
  }
  ctx.result.data = {{"n", cfg.n},
                     {"coupling", coupling},
                     {"measured_residual", residual},
                     {"events", events},
                     {"locus", tangency::to_json(locus)}};
}

void run_wangyoung(Ctx& ctx) {
  using namespace wangyoung;
  const auto ms = find_mu_star();
  const double lo = 1.5 * std::sqrt(3.0);
  ctx.check(ms.mu_star > lo && ms.mu_star < 3.0, "mu* = " + fmt(ms.mu_star, 16) + " in (3 sqrt3/2, 3)");
  ctx.check(ms.f3_residual < ctx.num("wangyoung.f3_tolerance"), "|F^3(c)| = " + fmt(ms.f3_residual, 3));

  const auto I = build_interval(ms.mu_star);  // throws naming a broken relation
  ctx.check(true, "ordering chain holds, r = " + fmt(I.r, 16));
  ctx.check(build_interval_mirror(ms.mu_star) == -I.r, "mirror construction gives -r");

  MisiurewiczOptions mo;
  mo.max_period = static_cast<int>(ctx.integer("wangyoung.max_period"));
  mo.threads = ctx.opts.threads;
  const auto cert = misiurewicz_check(ms.mu_star, I, mo);
  for (const auto& ch : cert.checks) ctx.check(ch.passed, ch.name + ": " + ch.witness);

  const auto nd = nondegeneracy_check(ms.mu_star);
  ctx.check(nd.passed, "dF/dx = 1 at the critical points");

  const auto t = transversality_check(ms.mu_star);
  ctx.check(t.dp_dmu < ctx.num("wangyoung.dp_max"), "dp/dmu = " + fmt(t.dp_dmu, 8) + " (fd " + fmt(t.dp_dmu_fd, 8) + ")");
  ctx.check(t.dFc_dmu > ctx.num("wangyoung.dFc_min"), "sqrt(mu*/3) = " + fmt(t.dFc_dmu, 8));
  ctx.check(std::abs(t.h_at_lower - ctx.num("wangyoung.h_lower")) <= ctx.num("wangyoung.h_lower_tolerance"),
            "h(3 sqrt3/2) = " + fmt(t.h_at_lower, 8));
  ctx.check(t.passed, "transversality");
  ctx.result.data = {{"mu_star", to_json(ms)}, {"interval", to_json(I)}, {"certificate", to_json(cert)},
                     {"transversality", to_json(t)}, {"nondegeneracy", to_json(nd)}};
}

std::array<double, 2> quadratic_roots(double p, double q) {
  // lambda^2 + p lambda + q, real roots, decreasing modulus
  const double disc = p * p - 4 * q;
  if (disc < 0) throw std::domain_error("complex roots");
  const double s = -0.5 * (p + std::copysign(std::sqrt(disc), p));
  std::array<double, 2> r{s, q / s};
  if (std::abs(r[0]) < std::abs(r[1])) std::swap(r[0], r[1]);
  return r;
}

void run_attractor(Ctx& ctx) {
  const double a = ctx.num("attractor.a"), b = ctx.num("attractor.b");
  const auto map = planar::cubic_henon_family()({a, b});
  const auto fps = planar::find_periodic_points(map, 1, {-3, 3, -3, 3}, 50, 1e-12, ctx.opts.threads);
  ctx.check(fps.size() == 3, std::to_string(fps.size()) + " fixed points in [-3,3]^2");
  const double tol = ctx.num("attractor.eigen_tolerance");
  nlohmann::json table = nlohmann::json::array();
  for (const auto& s : fps) {
    const bool origin = std::hypot(s.location.x, s.location.y) < 1e-8;
    const auto roots = origin ? quadratic_roots(ctx.num("attractor.origin_p"), ctx.num("attractor.origin_q"))
                              : quadratic_roots(ctx.num("attractor.outer_p"), ctx.num("attractor.outer_q"));
    const double err = std::max(std::abs(s.eigenvalues[0] - roots[0]), std::abs(s.eigenvalues[1] - roots[1]));
    ctx.check(s.is_saddle() && err < tol, std::string(origin ? "origin" : "outer point") + " (" + fmt(s.location.x) +
                                              ", " + fmt(s.location.y) + ") " + planar::to_string(s.spectrum) +
                                              ", eigenvalues " + fmt(s.eigenvalues[0], 10) + ", " +
                                              fmt(s.eigenvalues[1], 10) + ", error " + fmt(err, 3));
    table.push_back(planar::to_json(s));
  }

  const long steps = ctx.integer("attractor.steps");
  const std::vector<Vec2> seeds{{0.1, 0.9}, {0.0, 0.5}, {-0.2, -1.1}, {0.05, 1.2}, {-0.05, -0.3}};
  std::vector<planar::LyapunovEstimate> est(seeds.size());
  parallel_for(seeds.size(), ctx.opts.threads, [&](std::size_t i) { est[i] = planar::lyapunov(map, seeds[i], steps, 1000); });
  double mean = 0;
  bool positive = true;
  for (const auto& e : est) {
    positive = positive && e.bounded && e.exponent > 0;
    mean += e.exponent / static_cast<double>(est.size());
  }
  double spread = 0;
  std::string values;
  for (const auto& e : est) {
    spread = std::max(spread, std::abs(e.exponent - mean));
    values += (values.empty() ? "" : ", ") + fmt(e.exponent);
  }
  ctx.check(positive, "top Lyapunov estimates over " + std::to_string(steps) + " steps: " + values);
  ctx.check(spread <= ctx.num("attractor.seed_spread"), "seed spread " + fmt(spread, 3) + " around " + fmt(mean));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3, 3);
  double det_err = 0, fd_err = 0;
  const double det = ctx.num("attractor.determinant");
  for (int i = 0; i < 1000; ++i) {
    const Vec2 p{u(rng), u(rng)};
    det_err = std::max(det_err, std::abs(map.jacobian_at(p).det() - det));
    fd_err = std::max(fd_err, std::abs(map.finite_difference_jacobian(p).det() - det));
  }
  ctx.check(det_err < 1e-12 && fd_err < 1e-6,
            "Jacobian determinant " + fmt(det) + ": analytic error " + fmt(det_err, 3) + ", finite-difference error " + fmt(fd_err, 3));

  nlohmann::json ly = nlohmann::json::array();
  for (const auto& e : est) ly.push_back(planar::to_json(e));
  ctx.result.data = {{"fixed_points", table}, {"lyapunov", ly}, {"mean_exponent", mean}};
}

void run_structural(Ctx& ctx) {
  const double tol = ctx.num("structural.roundtrip_tolerance");
  std::mt19937_64 rng(11);
  auto worst_roundtrip = [&](const std::function<Vec2(const Vec2&)>& there, const std::function<Vec2(const Vec2&)>& back,
                             const Box2& box) {
    std::uniform_real_distribution<double> ux(box.x_lo, box.x_hi), uy(box.y_lo, box.y_hi);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
      const Vec2 p{ux(rng), uy(rng)};
      worst = std::max(worst, distance(back(there(p)), p));
    }
    return worst;
  };

  const auto henon = planar::cubic_henon_family()({2.8, 0.1});
  const double e1 = worst_roundtrip(henon.forward, henon.inverse, {-3, 3, -3, 3});
  const double e2 = worst_roundtrip(henon.inverse, henon.forward, {-0.3, 0.3, -3, 3});
  ctx.check(e1 < tol && e2 < tol, "cubic Henon inverse round trips " + fmt(e1, 3) + ", " + fmt(e2, 3));

  const auto lin = planar::linear_family()({0.2, 2.0});
  const double e3 = std::max(worst_roundtrip(lin.forward, lin.inverse, {-2, 2, -2, 2}),
                             worst_roundtrip(lin.inverse, lin.forward, {-2, 2, -2, 2}));
  ctx.check(e3 < tol, "linear map inverse round trips " + fmt(e3, 3));

  renorm::ModelParams mp;
  const renorm::RenormalizedMap psi(mp, 6, 3.0, 0.0);
  const double e4 = worst_roundtrip([&](const Vec2& p) { return renorm::to_vec(psi(renorm::to_long(p))); },
                                    [&](const Vec2& p) { return renorm::to_vec(psi.inverse(renorm::to_long(p))); },
                                    {-2, 2, -2, 2});
  const double e5 = worst_roundtrip(
      [&](const Vec2& p) { return renorm::to_vec(renorm::phi_n(mp, 6, renorm::to_long(p))); },
      [&](const Vec2& p) { return renorm::to_vec(renorm::phi_n_inverse(mp, 6, renorm::to_long(p))); }, {-2, 2, -2, 2});
  const double e6 = worst_roundtrip(
      [&](const Vec2& p) {
        auto [m, n] = renorm::theta_n(mp, 6, p.x, p.y);
        return Vec2{static_cast<double>(m), static_cast<double>(n)};
      },
      [&](const Vec2& p) {
        auto [m, n] = renorm::theta_n_inverse(mp, 6, p.x, p.y);
        return Vec2{static_cast<double>(m), static_cast<double>(n)};
      },
      {0, 4, -1, 1});
  ctx.check(e4 < tol && e5 < tol && e6 < tol, "renormalized map, coordinate change and reparameterization round trips " +
                                                  fmt(e4, 3) + ", " + fmt(e5, 3) + ", " + fmt(e6, 3));

  for (auto [l, s] : {std::pair{0.2, 2.0}, std::pair{0.5, 3.0}}) {
    const auto m = planar::linear_family()({l, s});
    const auto est = planar::lyapunov(m, {0, 0}, 10000, 100);
    ctx.check(std::abs(est.exponent - std::log(s)) < ctx.num("structural.lyapunov_tolerance"),
              "linear (" + fmt(l) + ", " + fmt(s) + ") exponent " + fmt(est.exponent, 15) + " vs ln sigma " +
                  fmt(std::log(s), 15));
  }

  using namespace cantor;
  MarkovBranchSystem thirds{{0, 1},
                            {{{0, Rational(1, 3)}, {3, 0}}, {{Rational(2, 3), 1}, {3, -2}}}};
  const auto mt = markov_cantor(thirds, 6);
  ctx.check(mt.ok() && thickness(*mt.set).thickness == ctx.rational("structural.middle_thirds_thickness"),
            "middle-thirds thickness " + (mt.ok() ? cubiclab::to_string(thickness(*mt.set).thickness) : "n/a"));

  // Linked: K_6 against a small translate. Nested: a scaled copy in a gap.
  std::vector<ExactCantor> k6, k6s;
  for (int g = 1; g <= 6; ++g) {
    k6.push_back(build_Km(6, g));
    k6s.push_back(affine_image(k6.back(), 1, Rational(1, 1000)));
  }
  const auto linked = gap_lemma_check(k6, k6s);
  ctx.check(linked.verdict == GapLemmaVerdict::intervals_intersect,
            "K_6 vs translate: " + to_string(linked.verdict) +
                (linked.thickness_product ? ", thickness product " + cubiclab::to_string(*linked.thickness_product) : ""));

  std::vector<ExactCantor> big, small;
  for (int g = 1; g <= 4; ++g) {
    const auto c = *markov_cantor(thirds, g).set;
    big.push_back(c);
    small.push_back(affine_image(c, Rational(1, 10), Rational(2, 5)));
  }
  const auto s_in_b = gap_lemma_check(big, small);
  const auto b_in_s = gap_lemma_check(small, big);
  ctx.check(s_in_b.verdict == GapLemmaVerdict::second_in_gap_of_first,
            "middle thirds vs copy in its middle gap: " + to_string(s_in_b.verdict));
  ctx.check(b_in_s.verdict == GapLemmaVerdict::first_in_gap_of_second,
            "copy vs middle thirds: " + to_string(b_in_s.verdict));
  ctx.result.data = {{"gap_lemma", {to_json(linked), to_json(s_in_b), to_json(b_in_s)}}};
}

}  // namespace

const nlohmann::json& default_constants() {
  static const nlohmann::json c{
      {"cantor.q0", "45/91"},
      {"cantor.bound_m6", "342/11"},
      {"cantor.generations", 4},
      {"conjugacy.grid", 10000},
      {"conjugacy.tolerance", 1e-12},
      {"renorm.relative_tolerance", 1e-10},
      {"renorm.closed_form_factor", 2.0},
      {"renorm.xi", std::sqrt(0.5)},
      {"renorm.rate_tolerance", 0.05},
      {"velocity.dy_dmu", 0.25},
      {"velocity.dy_dnu", 0.10},
      {"velocity.dFc_dmu", 1.0},
      {"velocity.tolerance_orbit", 1e-3},
      {"velocity.tolerance_critical", 1e-6},
      {"tangency.n", 6},
      {"tangency.max_coupling", 0.05},
      {"tangency.upper_slope", 0.9},
      {"tangency.slope_band", 0.1},
      {"tangency.locus_slope", -5.0 / 6.0},
      {"tangency.locus_band", 0.1},
      {"wangyoung.f3_tolerance", 1e-9},
      {"wangyoung.max_period", 8},
      {"wangyoung.dp_max", 0.4},
      {"wangyoung.dFc_min", 0.9},
      {"wangyoung.h_lower", 0.3699},
      {"wangyoung.h_lower_tolerance", 1e-4},
      {"attractor.a", 2.8},
      {"attractor.b", 0.1},
      {"attractor.origin_p", -2.8},
      {"attractor.origin_q", -0.1},
      {"attractor.outer_p", 2.9},
      {"attractor.outer_q", -0.1},
      {"attractor.eigen_tolerance", 1e-8},
      {"attractor.steps", 1000000},
      {"attractor.seed_spread", 0.02},
      {"attractor.determinant", -0.1},
      {"structural.roundtrip_tolerance", 1e-10},
      {"structural.lyapunov_tolerance", 1e-9},
      {"structural.middle_thirds_thickness", "1"},
  };
  return c;
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {1, "cantor", {"thickness"}, "Cantor exactness and thickness bound", 5,
       [](const Options& o, CriterionResult& r) { Ctx c(o, r); run_cantor(c); }},
      {2, "conjugacy", {}, "Conjugacy of the N-map and the cubic", 1,
       [](const Options& o, CriterionResult& r) { Ctx c(o, r); run_conjugacy(c); }},
      {3, "renorm", {"renormalization"}, "Renormalization rate", 30,
       [](const Options& o, CriterionResult& r) { Ctx c(o, r); run_renorm(c); }},
      {4, "velocity", {}, "Velocity table", 1,
       [](const Options& o, CriterionResult& r) { Ctx c(o, r); run_velocity(c); }},
      {5, "tangency", {"antimonotonicity"}, "Tangency antimonotonicity", 300,
       [](const Options& o, CriterionResult& r) { Ctx c(o, r); run_tangency(c); }},
      {6, "wangyoung", {"misiurewicz"}, "Wang-Young certificate", 30,
       [](const Options& o, CriterionResult& r) { Ctx c(o, r); run_wangyoung(c); }},
      {7, "attractor", {"lyapunov"}, "Attractor consistency", 120,
       [](const Options& o, CriterionResult& r) { Ctx c(o, r); run_attractor(c); }},
      {8, "structural", {"invariants"}, "Structural invariants", 30,
       [](const Options& o, CriterionResult& r) { Ctx c(o, r); run_structural(c); }},
  };
  return list;
}

std::string canonical_key(const std::string& name) {
  for (const auto& c : criteria()) {
    if (c.key == name || std::to_string(c.id) == name) return c.key;
    if (std::find(c.aliases.begin(), c.aliases.end(), name) != c.aliases.end()) return c.key;
  }
  return {};
}

CriterionResult run_criterion(const Criterion& c, const Options& options) {
  for (const auto& [k, v] : options.constants.items())
    if (!default_constants().contains(k)) throw std::invalid_argument("unknown constant '" + k + "'");
  CriterionResult r;
  r.id = c.id;
  r.key = c.key;
  r.title = c.title;
  r.budget_seconds = c.budget_seconds;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    c.run(options, r);
  } catch (const std::exception& e) {
    r.details.push_back(std::string("FAIL  exception: ") + e.what());
    if (r.failure.empty()) r.failure = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.within_budget = r.seconds < r.budget_seconds;
  if (!r.within_budget && r.failure.empty())
    r.failure = "runtime " + fmt(r.seconds, 3) + " s exceeds " + fmt(r.budget_seconds) + " s";
  r.passed = r.failure.empty();
  return r;
}

SuiteReport run_suite(const Options& options) {
  std::set<std::string> skip;
  for (const auto& s : options.skip) {
    const auto k = canonical_key(s);
    if (k.empty()) throw std::invalid_argument("unknown criterion '" + s + "'");
    skip.insert(k);
  }
  SuiteReport rep;
  for (const auto& c : criteria()) {
    if (skip.count(c.key)) {
      CriterionResult r;
      r.id = c.id;
      r.key = c.key;
      r.title = c.title;
      r.budget_seconds = c.budget_seconds;
      r.skipped = true;
      rep.results.push_back(r);
      continue;
    }
    rep.results.push_back(run_criterion(c, options));
  }
  return rep;
}

bool SuiteReport::passed() const {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.skipped || r.passed; });
}

std::vector<std::string> SuiteReport::failing() const {
  std::vector<std::string> out;
  for (const auto& r : results)
    if (!r.skipped && !r.passed) out.push_back(r.key);
  return out;
}

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& r : results) {
    list.push_back({{"id", r.id},
                    {"key", r.key},
                    {"title", r.title},
                    {"status", r.skipped ? "skipped" : (r.passed ? "pass" : "fail")},
                    {"budget_seconds", r.budget_seconds},
                    {"within_budget", r.within_budget},
                    {"failure", r.failure},
                    {"details", r.details},
                    {"data", r.data}});
  }
  return {{"schema_version", report::schema_version}, {"passed", passed()}, {"failing", failing()}, {"criteria", list}};
}

std::string SuiteReport::table() const {
  std::ostringstream os;
  for (const auto& r : results) {
    os << (r.skipped ? "SKIP" : (r.passed ? "PASS" : "FAIL")) << "  " << r.id << "  " << std::left << std::setw(11)
       << r.key << std::setw(40) << r.title;
    if (!r.skipped) os << std::right << std::setw(8) << std::fixed << std::setprecision(2) << r.seconds << " s / "
                       << std::defaultfloat << r.budget_seconds << " s";
    if (!r.failure.empty()) os << "  " << r.failure;
    os << '\n';
  }
  return os.str();
}

}  // namespace cubiclab::acceptance
