#pragma once

#include "cubiclab/interval.hpp"
#include "cubiclab/planar.hpp"
#include "cubiclab/renorm.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace cubiclab::wangyoung {

/// F_mu(y) = -y^3 + mu y (nu_bar = 0).
double F(double mu, double y);
/// g(mu) = F_mu^2(c) + sqrt(mu), c = sqrt(mu / 3).
double g_function(double mu);

struct MuStar {
  double mu_star = 0;
  double bracket_lo = 0, bracket_hi = 0;
  double g_lo = 0, g_hi = 0;  // g at 3 sqrt(3)/2 and at 3
  double width = 0;
  int iterations = 0;
  double f3_residual = 0;     // |F^3(c)|
};

/// Bisection of g over [3 sqrt(3)/2, 3]. std::logic_error when the bracket
/// values do not have the expected signs.
MuStar find_mu_star(double tol = 1e-15);

struct IntervalConstruction {
  double mu = 0;
  double c = 0;        // sqrt(mu / 3)
  double e = 0;        // sqrt(mu - 1), repelling fixed point
  double r_prime = 0;  // F(r') = e on (-inf, -c]
  double r = 0;        // F(r) = r', r > F(c)
  std::vector<std::pair<std::string, double>> chain;
  double f2_r = 0;     // F^2(r), equals e
  double f2_minus_r = 0;
  Interval<double> I;
  Interval<double> image;  // F(I)
};

/// std::logic_error naming the violated relation when the eight-term chain
/// -r < F(-c) < F(r) < -c < c < F(-r) < F(c) < r or F(I) in Int(I) fails.
IntervalConstruction build_interval(double mu_star);

/// Mirror construction started from -c; returns -r.
double build_interval_mirror(double mu_star);

struct Check {
  std::string name;
  bool passed = false;
  std::string witness;
  nlohmann::json data;
};

struct MisiurewiczCertificate {
  double mu_star = 0;
  Interval<double> I;
  std::vector<double> critical_orbit;  // c, F(c), F^2(c), F^3(c), F^4(c)
  std::vector<Check> checks;
  bool passed() const;
};

struct MisiurewiczOptions {
  int max_period = 8;
  int schwarzian_samples = 1000;
  double oversample = 4.0;
  double multiplier_margin = 1e-6;
  unsigned threads = 1;
};

MisiurewiczCertificate misiurewicz_check(double mu_star, const IntervalConstruction& I,
                                         const MisiurewiczOptions& options = {});

struct TransversalityReport {
  double mu_star = 0;
  double p = 0;               // F(c) at mu_star
  double dp_dmu = 0;          // closed form
  double h_at_mu = 0;         // h(mu_star)
  double dp_dmu_fd = 0;       // implicit solve of F_mu(p) = -sqrt(mu), central differences
  double dFc_dmu = 0;         // sqrt(mu_star / 3)
  double h_at_lower = 0;      // h(3 sqrt(3)/2)
  double dFc_at_lower = 0;    // sqrt(mu / 3) at 3 sqrt(3)/2
  bool h_decreasing = false;  // sampled on [3 sqrt(3)/2, 3]
  double margin_dp = 0;       // 0.4 - dp_dmu
  double margin_dFc = 0;      // dFc_dmu - 0.9
  bool passed = false;
};

double h_function(double t);
TransversalityReport transversality_check(double mu_star);

struct NondegeneracyReport {
  double at_plus_c = 0;
  double at_minus_c = 0;
  double at_generic = 0;
  bool passed = false;
};

/// d/dx̃ of F(x̃, ỹ, mu) = -ỹ^3 + mu ỹ + x̃ at the critical points.
NondegeneracyReport nondegeneracy_check(double mu_star);

// ---------------------------------------------------------------------------
// T family (beta u, -ỹ^3 + mu ỹ + x̃ + beta v)
// ---------------------------------------------------------------------------

struct TComponents {
  std::string name;
  /// (u, v) at (mu_bar, beta, point).
  std::function<std::pair<double, double>(double, double, const Vec2&)> uv;
  /// Optional inverse of the whole map at (mu_bar, beta).
  std::function<Vec2(double, double, const Vec2&)> inverse;
};

/// (u, v) = (ỹ, 0).
TComponents henon_components();
/// The conjugated renormalized map at level n with nu_bar = s beta.
TComponents renorm_components(const renorm::ModelParams& model, int n, double s);

/// Parameters {mu_bar, beta}.
planar::PlanarFamily make_T_family(const TComponents& components);

nlohmann::json to_json(const MuStar& m);
nlohmann::json to_json(const IntervalConstruction& I);
nlohmann::json to_json(const MisiurewiczCertificate& c);
nlohmann::json to_json(const TransversalityReport& t);
nlohmann::json to_json(const NondegeneracyReport& n);

}  // namespace cubiclab::wangyoung
