#include "cubiclab/wangyoung.hpp"

#include "cubiclab/maps1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cubiclab::wangyoung {

double F(double mu, double y) { return -y * y * y + mu * y; }

namespace {

double dF(double mu, double y) { return -3 * y * y + mu; }

double lower_mu() { return 1.5 * std::sqrt(3.0); }

/// Root of a decreasing function on [lo, hi] by bisection to full precision.
double bisect_decreasing(const std::function<double(double)>& f, double lo, double hi) {
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > 0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

double g_function(double mu) {
  const double c = std::sqrt(mu / 3);
  return F(mu, F(mu, c)) + std::sqrt(mu);
}

MuStar find_mu_star(double tol) {
  MuStar m;
  m.bracket_lo = lower_mu();
  m.bracket_hi = 3.0;
  m.g_lo = g_function(m.bracket_lo);
  m.g_hi = g_function(m.bracket_hi);
  if (!(m.g_lo > 0)) throw std::logic_error("find_mu_star: g(3 sqrt(3)/2) = " + fmt(m.g_lo) + " is not positive");
  if (!(m.g_hi < 0)) throw std::logic_error("find_mu_star: g(3) = " + fmt(m.g_hi) + " is not negative");
  double lo = m.bracket_lo, hi = m.bracket_hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ++m.iterations;
    if (g_function(mid) > 0) lo = mid;
    else hi = mid;
  }
  m.mu_star = 0.5 * (lo + hi);
  m.width = hi - lo;
  const double c = std::sqrt(m.mu_star / 3);
  m.f3_residual = std::abs(F(m.mu_star, F(m.mu_star, F(m.mu_star, c))));
  return m;
}

namespace {

/// r for side = +1, -r for side = -1; the mirrored run uses exactly negated
/// brackets so oddness of F carries through bisection.
std::pair<double, double> solve_r(double mu, int side) {
  const double c = std::sqrt(mu / 3), e = std::sqrt(mu - 1);
  const double big = 10.0;
  const double target = side * e;
  auto f1 = [&](double x) { return F(mu, x) - target; };
  const double r_prime = side > 0 ? bisect_decreasing(f1, -big, -c) : bisect_decreasing(f1, c, big);
  auto f2 = [&](double x) { return F(mu, x) - r_prime; };
  const double fc = F(mu, side * c);
  const double r = side > 0 ? bisect_decreasing(f2, fc, big) : bisect_decreasing(f2, -big, fc);
  return {r_prime, r};
}

}  // namespace

IntervalConstruction build_interval(double mu) {
  if (!(mu > 1)) throw std::invalid_argument("build_interval: mu must exceed 1");
  IntervalConstruction I;
  I.mu = mu;
  I.c = std::sqrt(mu / 3);
  I.e = std::sqrt(mu - 1);
  std::tie(I.r_prime, I.r) = solve_r(mu, 1);
  const double r = I.r, c = I.c;
  I.chain = {{"-r", -r},         {"F(-c)", F(mu, -c)}, {"F(r)", F(mu, r)}, {"-c", -c},
             {"c", c},           {"F(-r)", F(mu, -r)}, {"F(c)", F(mu, c)}, {"r", r}};
  for (std::size_t i = 1; i < I.chain.size(); ++i) {
    if (!(I.chain[i - 1].second < I.chain[i].second))
      throw std::logic_error("ordering violated: " + I.chain[i - 1].first + " < " + I.chain[i].first + " (" +
                             fmt(I.chain[i - 1].second) + " vs " + fmt(I.chain[i].second) + ")");
  }
  I.f2_r = F(mu, F(mu, r));
  I.f2_minus_r = F(mu, F(mu, -r));
  I.I = {-r, r};
  // Extremes of F on I: critical values and endpoint images.
  const double hi = std::max({F(mu, c), F(mu, -c), F(mu, r), F(mu, -r)});
  const double lo = std::min({F(mu, c), F(mu, -c), F(mu, r), F(mu, -r)});
  I.image = {lo, hi};
  if (!(-r < lo && hi < r)) throw std::logic_error("ordering violated: F(I) is not inside Int(I)");
  return I;
}

double build_interval_mirror(double mu_star) { return solve_r(mu_star, -1).second; }

bool MisiurewiczCertificate::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

MisiurewiczCertificate misiurewicz_check(double mu, const IntervalConstruction& I, const MisiurewiczOptions& o) {
  MisiurewiczCertificate cert;
  cert.mu_star = mu;
  cert.I = I.I;
  const double c = std::sqrt(mu / 3);
  double y = c;
  for (int k = 0; k < 5; ++k) {
    cert.critical_orbit.push_back(y);
    y = F(mu, y);
  }

  {  // (i) nondegenerate critical points
    Check ch{"critical points nondegenerate", false, "", {}};
    const double d2p = -6 * c, d2m = 6 * c;
    ch.passed = d2p != 0 && d2m != 0;
    ch.witness = "F''(c) = " + fmt(d2p) + ", F''(-c) = " + fmt(d2m);
    ch.data = {{"F2_at_c", d2p}, {"F2_at_minus_c", d2m}};
    cert.checks.push_back(ch);
  }
  {  // (ii) negative Schwarzian
    Check ch{"negative Schwarzian", true, "", {}};
    maps1d::CubicMap map{mu, 0.0};
    double worst = -std::numeric_limits<double>::infinity(), worst_y = 0;
    int used = 0;
    for (int k = 0; k < o.schwarzian_samples; ++k) {
      const double s = I.I.lo + I.I.length() * (k + 0.5) / o.schwarzian_samples;
      if (std::abs(std::abs(s) - c) < 1e-9) continue;
      const double v = maps1d::schwarzian(map, s);
      ++used;
      if (v > worst) {
        worst = v;
        worst_y = s;
      }
    }
    const bool closed = mu > 0;  // numerator -6(6y^2 + mu) is then negative everywhere
    ch.passed = worst < 0 && closed;
    ch.witness = "max sampled Schwarzian " + fmt(worst) + " at y = " + fmt(worst_y) +
                 "; closed form -6(6y^2+mu)/(-3y^2+mu)^2 < 0 for mu > 0";
    ch.data = {{"samples", used}, {"max_sampled", worst}, {"argmax", worst_y}, {"closed_form_negative", closed}};
    cert.checks.push_back(ch);
  }
  {  // (iii) periodic orbits repelling
    Check ch{"periodic orbits repelling", true, "", {}};
    const auto map = maps1d::as_map1d(maps1d::CubicMap{mu, 0.0});
    nlohmann::json per = nlohmann::json::array();
    double weakest = std::numeric_limits<double>::infinity();
    int weakest_period = 0;
    double weakest_point = 0;
    for (int p = 1; p <= o.max_period; ++p) {
      maps1d::PeriodicSearchOptions so;
      so.oversample = o.oversample;
      so.threads = o.threads;
      auto res = maps1d::find_periodic(map, p, I.I, 1e-5, so);
      double pmin = std::numeric_limits<double>::infinity();
      for (const auto& orb : res.orbits) {
        const double m = std::abs(orb.multiplier);
        pmin = std::min(pmin, m);
        if (m < weakest) {
          weakest = m;
          weakest_period = p;
          weakest_point = orb.points.front();
        }
      }
      if (!res.unresolved.empty()) ch.passed = false;
      per.push_back({{"period", p}, {"orbits", res.orbits.size()}, {"unresolved", res.unresolved.size()},
                     {"min_abs_multiplier", res.orbits.empty() ? nlohmann::json(nullptr) : nlohmann::json(pmin)}});
    }
    if (!(weakest >= 1 + o.multiplier_margin)) ch.passed = false;
    ch.witness = "weakest |multiplier| " + fmt(weakest) + " (period " + std::to_string(weakest_period) +
                 ", orbit through " + fmt(weakest_point) + ")";
    ch.data = {{"per_period", per}, {"weakest_multiplier", weakest}, {"weakest_period", weakest_period}};
    cert.checks.push_back(ch);
  }
  {  // (iv) critical orbit stays away from the critical set
    Check ch{"critical orbit away from critical set", false, "", {}};
    const std::vector<std::pair<std::string, double>> pts{
        {"F(c)", cert.critical_orbit[1]}, {"-sqrt(mu)", -std::sqrt(mu)}, {"0", 0.0}};
    double best = std::numeric_limits<double>::infinity();
    std::string arg;
    nlohmann::json dist = nlohmann::json::object();
    for (const auto& [name, v] : pts) {
      const double d = std::min(std::abs(v - c), std::abs(v + c));
      dist[name] = d;
      if (d < best) {
        best = d;
        arg = name;
      }
    }
    const double closure = std::abs(F(mu, -std::sqrt(mu))) + std::abs(F(mu, 0.0));
    const double landing = std::abs(cert.critical_orbit[2] + std::sqrt(mu));
    ch.passed = best > 0 && closure == 0.0 && landing < 1e-9;
    ch.witness = "inf distance " + fmt(best) + " attained at " + arg;
    ch.data = {{"distances", dist}, {"inf_distance", best}, {"closure_F_of_minus_sqrt_mu_and_0", closure},
               {"F2c_plus_sqrt_mu", landing}};
    cert.checks.push_back(ch);
  }
  {  // F(I) inside Int(I)
    Check ch{"F(I) inside Int(I)", I.I.lo < I.image.lo && I.image.hi < I.I.hi, "", {}};
    ch.witness = "F(I) = [" + fmt(I.image.lo) + ", " + fmt(I.image.hi) + "], I = [" + fmt(I.I.lo) + ", " + fmt(I.I.hi) + "]";
    cert.checks.push_back(ch);
  }
  return cert;
}

double h_function(double t) {
  return (4 * std::sqrt(3.0) * t * t + 9) / (2 * t * std::sqrt(t) * (4 * t * t - 9));
}

namespace {

double dp_closed(double mu, double p) { return (2 * p + 1 / std::sqrt(mu)) / (6 * p * p - 2 * mu); }

/// Solution of F_mu(p) = -sqrt(mu) near `seed`.
double implicit_p(double mu, double seed) {
  double p = seed;
  for (int it = 0; it < 100; ++it) {
    const double step = (F(mu, p) + std::sqrt(mu)) / dF(mu, p);
    p -= step;
    if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(p))) break;
  }
  return p;
}

}  // namespace

TransversalityReport transversality_check(double mu) {
  TransversalityReport t;
  t.mu_star = mu;
  t.p = 2 * mu / 3 * std::sqrt(mu / 3);
  t.dp_dmu = dp_closed(mu, t.p);
  t.h_at_mu = h_function(mu);
  const double h = 1e-6;
  t.dp_dmu_fd = (implicit_p(mu + h, t.p) - implicit_p(mu - h, t.p)) / (2 * h);
  t.dFc_dmu = std::sqrt(mu / 3);
  t.h_at_lower = h_function(lower_mu());
  t.dFc_at_lower = std::sqrt(lower_mu() / 3);
  t.h_decreasing = true;
  constexpr int samples = 1000;
  double prev = h_function(lower_mu());
  for (int k = 1; k <= samples; ++k) {
    const double s = lower_mu() + (3 - lower_mu()) * k / samples;
    const double v = h_function(s);
    if (!(v < prev)) t.h_decreasing = false;
    prev = v;
  }
  t.margin_dp = 0.4 - t.dp_dmu;
  t.margin_dFc = t.dFc_dmu - 0.9;
  t.passed = t.dp_dmu < 0.4 && t.dFc_dmu > 0.9 && t.h_decreasing && t.h_at_lower < 0.4 && t.dFc_at_lower > 0.9 &&
             std::abs(t.dp_dmu - t.h_at_mu) < 1e-12 && std::abs(t.dp_dmu - t.dp_dmu_fd) < 1e-5;
  return t;
}

NondegeneracyReport nondegeneracy_check(double mu) {
  auto partial_x = [mu](double y) {
    const double h = 1e-3;
    auto f = [&](double x) { return -y * y * y + mu * y + x; };
    return (f(h) - f(-h)) / (2 * h);
  };
  NondegeneracyReport r;
  const double c = std::sqrt(mu / 3);
  r.at_plus_c = partial_x(c);
  r.at_minus_c = partial_x(-c);
  r.at_generic = partial_x(0.37);
  r.passed = r.at_plus_c != 0 && r.at_minus_c != 0;
  return r;
}

// ---------------------------------------------------------------------------

TComponents henon_components() {
  TComponents t;
  t.name = "henon";
  t.uv = [](double, double, const Vec2& p) { return std::pair<double, double>{p.y, 0.0}; };
  t.inverse = [](double mu, double beta, const Vec2& p) {
    const double y = p.x / beta;
    return Vec2{p.y + y * y * y - mu * y, y};
  };
  return t;
}

TComponents renorm_components(const renorm::ModelParams& model, int n, double s) {
  model.validate();
  TComponents t;
  t.name = "renormalized";
  t.uv = [model, n, s](double mu, double beta, const Vec2& p) {
    renorm::RenormalizedMap psi(model, n, mu, s * beta);
    const renorm::real nu = s * beta;
    const renorm::PointL q = renorm::to_long(p);
    const renorm::PointL out = renorm::standard_f(mu, nu, psi(renorm::standard_f_inverse(mu, nu, q)));
    const renorm::real base = -q.y * q.y * q.y + mu * q.y + q.x;
    return std::pair<double, double>{static_cast<double>(out.x / beta), static_cast<double>((out.y - base) / beta)};
  };
  if (model.c != 0) {
    t.inverse = [model, n, s](double mu, double beta, const Vec2& p) {
      renorm::RenormalizedMap psi(model, n, mu, s * beta);
      const renorm::real nu = s * beta;
      return renorm::to_vec(
          renorm::standard_f(mu, nu, psi.inverse(renorm::standard_f_inverse(mu, nu, renorm::to_long(p)))));
    };
  }
  return t;
}

planar::PlanarFamily make_T_family(const TComponents& comp) {
  planar::PlanarFamily fam{"T_" + comp.name, {"mu_bar", "beta"}, {}};
  fam.member = [comp](const planar::Params& q) {
    const double mu = q[0], beta = q[1];
    planar::PlanarMap m;
    m.name = "T_" + comp.name;
    m.params = {{"mu_bar", mu}, {"beta", beta}};
    auto uv = comp.uv;
    m.forward = [uv, mu, beta](const Vec2& p) {
      auto [u, v] = uv(mu, beta, p);
      return Vec2{beta * u, -p.y * p.y * p.y + mu * p.y + p.x + beta * v};
    };
    if (comp.inverse && beta != 0) {
      auto inv = comp.inverse;
      m.inverse = [inv, mu, beta](const Vec2& p) { return inv(mu, beta, p); };
    }
    if (comp.name == "henon") m.jacobian = [mu, beta](const Vec2& p) { return Mat2{0, beta, 1, -3 * p.y * p.y + mu}; };
    return m;
  };
  return fam;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const MuStar& m) {
  return {{"mu_star", m.mu_star}, {"bracket", {m.bracket_lo, m.bracket_hi}}, {"g_at_bracket", {m.g_lo, m.g_hi}},
          {"width", m.width},     {"iterations", m.iterations},             {"F3_residual", m.f3_residual}};
}

nlohmann::json to_json(const IntervalConstruction& I) {
  nlohmann::json chain = nlohmann::json::array();
  for (const auto& [name, v] : I.chain) chain.push_back({{"term", name}, {"value", v}});
  return {{"mu", I.mu},       {"c", I.c},           {"e", I.e},
          {"r_prime", I.r_prime}, {"r", I.r},       {"chain", chain},
          {"F2_r", I.f2_r},   {"F2_minus_r", I.f2_minus_r},
          {"I", {I.I.lo, I.I.hi}}, {"F_of_I", {I.image.lo, I.image.hi}}};
}

nlohmann::json to_json(const MisiurewiczCertificate& c) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& ch : c.checks)
    checks.push_back({{"name", ch.name}, {"passed", ch.passed}, {"witness", ch.witness}, {"data", ch.data}});
  return {{"mu_star", c.mu_star}, {"I", {c.I.lo, c.I.hi}}, {"critical_orbit", c.critical_orbit},
          {"checks", checks},     {"passed", c.passed()}};
}

nlohmann::json to_json(const TransversalityReport& t) {
  return {{"mu_star", t.mu_star},       {"p", t.p},
          {"dp_dmu", t.dp_dmu},         {"h_at_mu", t.h_at_mu},
          {"dp_dmu_fd", t.dp_dmu_fd},   {"dFc_dmu", t.dFc_dmu},
          {"h_at_lower", t.h_at_lower}, {"dFc_at_lower", t.dFc_at_lower},
          {"h_decreasing", t.h_decreasing}, {"margin_dp", t.margin_dp},
          {"margin_dFc", t.margin_dFc}, {"passed", t.passed}};
}

nlohmann::json to_json(const NondegeneracyReport& n) {
  return {{"at_plus_c", n.at_plus_c}, {"at_minus_c", n.at_minus_c}, {"at_generic", n.at_generic}, {"passed", n.passed}};
}

}  // namespace cubiclab::wangyoung
