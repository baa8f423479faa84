#pragma once

#include "cubiclab/geometry.hpp"
#include "cubiclab/planar.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cubiclab::renorm {

/// Internal working precision. The renormalized map subtracts nearly equal
/// quantities of size sigma^{-n}, so binary64 loses too many digits.
using real = long double;

struct PointL {
  real x = 0;
  real y = 0;
};

inline PointL to_long(const Vec2& v) { return {v.x, v.y}; }
inline Vec2 to_vec(const PointL& p) { return {static_cast<double>(p.x), static_cast<double>(p.y)}; }

struct Perturbation {
  enum class Kind { none, quartic };
  Kind kind = Kind::none;
  double epsilon = 0.0;

  static Perturbation none() { return {}; }
  static Perturbation quartic(double eps) { return {Kind::quartic, eps}; }
  /// H2 as a function of t = y - 1.
  real h2(real t) const { return kind == Kind::quartic ? static_cast<real>(epsilon) * t * t * t * t : 0; }
  /// Polynomial coefficients of H2 in t, lowest degree first.
  std::vector<double> coefficients() const;
  std::string describe() const;
};

/// Model of the saddle neighborhood: linear part (lambda x, sigma y) and the
/// transition map (1 + a(y-1) + H1, -b(y-1)^3 + mu(y-1) + nu + c x + H2).
struct ModelParams {
  double lambda = 0.2;
  double sigma = 2.0;
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  Perturbation perturbation;

  /// Throws std::invalid_argument naming the violated hypothesis.
  void validate() const;
  double g() const;                // sqrt(b)
  double xi() const;               // max(sigma^{-1/2}, lambda sigma)
  double coupling(int n) const;    // (lambda sigma)^n
};

/// Value and t-derivatives up to order 3 of H2 vanish at t = 0.
bool perturbation_is_flat(const Perturbation& p);

/// Phi_n(x̄, ȳ) = (1 + a g^{-1} sigma^{-n/2} x̄, sigma^{-n} + g^{-1} sigma^{-3n/2} ȳ).
PointL phi_n(const ModelParams& p, int n, const PointL& bar);
PointL phi_n_inverse(const ModelParams& p, int n, const PointL& original);

/// (mu, nu) = (sigma^{-n} mu_bar, g^{-1} sigma^{-3n/2} nu_bar - c lambda^n + sigma^{-n}).
std::pair<real, real> theta_n(const ModelParams& p, int n, real mu_bar, real nu_bar);
std::pair<real, real> theta_n_inverse(const ModelParams& p, int n, real mu, real nu);

struct RenormFrame {
  int n = 0;
  real mu = 0;
  real nu = 0;
  real x_scale = 0;   // a g^{-1} sigma^{-n/2}
  real y_offset = 0;  // sigma^{-n}
  real y_scale = 0;   // g^{-1} sigma^{-3n/2}
};

RenormFrame frame(const ModelParams& p, int n, real mu_bar, real nu_bar);

struct Evaluation {
  PointL value;
  bool escaped = false;
  int escape_stage = -1;  // 0: after Phi_n, k: after k linear steps
};

/// psi_{mu_bar, nu_bar, n} = Phi_n^{-1} o N o L^n o Phi_n.
class RenormalizedMap {
 public:
  RenormalizedMap(ModelParams params, int n, double mu_bar, double nu_bar,
                  std::optional<Box2> linearization_box = std::nullopt);

  const ModelParams& params() const { return params_; }
  int n() const { return frame_.n; }
  double mu_bar() const { return mu_bar_; }
  double nu_bar() const { return nu_bar_; }
  const RenormFrame& renorm_frame() const { return frame_; }

  PointL operator()(const PointL& bar) const;
  /// Forward evaluation with the linearization-box check on intermediate points.
  Evaluation evaluate(const PointL& bar) const;
  /// Compositional inverse; std::domain_error when c == 0 or a == 0.
  PointL inverse(const PointL& bar) const;
  /// (ȳ, -ȳ^3 + mu_bar ȳ + nu_bar).
  PointL limit(const PointL& bar) const;
  /// psi - limit.
  PointL residual(const PointL& bar) const;
  /// -a c (lambda sigma)^n, the determinant when H2 does not depend on x.
  real expected_determinant() const;

  planar::PlanarMap as_planar() const;

 private:
  ModelParams params_;
  double mu_bar_;
  double nu_bar_;
  RenormFrame frame_;
  std::optional<Box2> box_;
};

/// Family in (mu_bar, nu_bar) for fixed model and n.
planar::PlanarFamily renormalized_family(const ModelParams& p, int n);

// ---------------------------------------------------------------------------
// Residual measurement
// ---------------------------------------------------------------------------

struct ResidualOptions {
  Box2 box{-2, 2, -2, 2};
  int grid = 41;                 // nodes per side of the (x̄, ȳ) grid
  Box2 parameter_box{0, 4, -1, 1};
  int parameter_grid = 5;        // nodes per side of the (mu_bar, nu_bar) grid
  double fd_step = 1e-4;
  unsigned threads = 1;
};

struct ResidualNorm {
  int n = 0;
  double sup_h1 = 0;
  double sup_h2 = 0;
  double sup_dh1 = 0;  // first-derivative residuals by central differences
  double sup_dh2 = 0;
  double worst_mu_bar = 0;
  double worst_nu_bar = 0;
  double sup() const { return sup_h1 > sup_h2 ? sup_h1 : sup_h2; }
};

ResidualNorm residual_norm(const ModelParams& p, int n, const ResidualOptions& options = {});

struct DecayFit {
  std::vector<ResidualNorm> rows;
  std::vector<double> ratios;  // rows[i+1].sup / rows[i].sup
  double slope = 0;            // least-squares slope of log sup against n
  double intercept = 0;
  double predicted = 0;        // log(lambda sigma) unperturbed, log xi otherwise
  bool within(double tol) const;
};

DecayFit fit_decay(const ModelParams& p, int n_lo, int n_hi, const ResidualOptions& options = {});

/// Columns: n,mu_bar,nu_bar,sup_H1,sup_H2,ratio
void write_residual_csv(std::ostream& os, const DecayFit& fit);

// ---------------------------------------------------------------------------
// Conjugation to the standard form
// ---------------------------------------------------------------------------

/// f(x̄, ȳ) = (x̄^3 - mu_bar x̄ - nu_bar + ȳ, x̄).
PointL standard_f(real mu_bar, real nu_bar, const PointL& p);
/// f^{-1}(x̃, ỹ) = (ỹ, x̃ - ỹ^3 + mu_bar ỹ + nu_bar).
PointL standard_f_inverse(real mu_bar, real nu_bar, const PointL& p);

/// f o psi o f^{-1} for a map with parameters (mu_bar, nu_bar).
planar::PlanarMap conjugate_to_standard(const planar::PlanarMap& psi, double mu_bar, double nu_bar);

/// The conjugated renormalized map written as (beta u, -ỹ^3 + mu_bar ỹ + x̃ + beta v)
/// with beta = xi^n and nu_bar = s beta; u and v are returned at a point.
struct StandardFormParts {
  double beta = 0;
  double u = 0;
  double v = 0;
};

StandardFormParts standard_form_parts(const RenormalizedMap& psi, const PointL& tilde);

nlohmann::json to_json(const ModelParams& p);
nlohmann::json to_json(const ResidualNorm& r);
nlohmann::json to_json(const DecayFit& f);

}  // namespace cubiclab::renorm
