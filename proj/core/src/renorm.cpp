#include "cubiclab/renorm.hpp"

#include "cubiclab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cubiclab::renorm {

std::vector<double> Perturbation::coefficients() const {
  if (kind == Kind::none) return {0.0};
  return {0.0, 0.0, 0.0, 0.0, epsilon};
}

std::string Perturbation::describe() const {
  if (kind == Kind::none) return "none";
  std::ostringstream os;
  os << "quartic(" << epsilon << ")";
  return os.str();
}

bool perturbation_is_flat(const Perturbation& p) {
  auto c = p.coefficients();
  for (std::size_t k = 0; k < 4 && k < c.size(); ++k)
    if (c[k] != 0.0) return false;
  return true;
}

void ModelParams::validate() const {
  if (!(lambda > 0 && lambda < 1)) throw std::invalid_argument("lambda must satisfy 0 < lambda < 1");
  if (!(sigma > 1)) throw std::invalid_argument("sigma must satisfy sigma > 1");
  if (!(lambda * sigma < 1)) throw std::invalid_argument("lambda * sigma must be < 1 (dissipative saddle)");
  if (!(b > 0)) throw std::invalid_argument("b must be positive");
  if (a == 0) throw std::invalid_argument("a must be nonzero");
  if (!std::isfinite(c)) throw std::invalid_argument("c must be finite");
  if (perturbation.kind == Perturbation::Kind::quartic && !std::isfinite(perturbation.epsilon))
    throw std::invalid_argument("quartic epsilon must be finite");
  if (!perturbation_is_flat(perturbation)) throw std::invalid_argument("perturbation violates the vanishing conditions");
}

double ModelParams::g() const { return std::sqrt(b); }
double ModelParams::xi() const { return std::max(1.0 / std::sqrt(sigma), lambda * sigma); }
double ModelParams::coupling(int n) const { return std::pow(lambda * sigma, n); }

namespace {

real rpow(double base, real e) { return std::pow(static_cast<real>(base), e); }

void check_n(int n) {
  if (n < 0) throw std::invalid_argument("n must be nonnegative");
}

}  // namespace

RenormFrame frame(const ModelParams& p, int n, real mu_bar, real nu_bar) {
  check_n(n);
  RenormFrame f;
  f.n = n;
  const real g = std::sqrt(static_cast<real>(p.b));
  f.x_scale = static_cast<real>(p.a) / g * rpow(p.sigma, -n / 2.0L);
  f.y_offset = rpow(p.sigma, -static_cast<real>(n));
  f.y_scale = rpow(p.sigma, -1.5L * n) / g;
  auto [mu, nu] = theta_n(p, n, mu_bar, nu_bar);
  f.mu = mu;
  f.nu = nu;
  return f;
}

PointL phi_n(const ModelParams& p, int n, const PointL& bar) {
  RenormFrame f = frame(p, n, 0, 0);
  return {1 + f.x_scale * bar.x, f.y_offset + f.y_scale * bar.y};
}

PointL phi_n_inverse(const ModelParams& p, int n, const PointL& original) {
  RenormFrame f = frame(p, n, 0, 0);
  return {(original.x - 1) / f.x_scale, (original.y - f.y_offset) / f.y_scale};
}

std::pair<real, real> theta_n(const ModelParams& p, int n, real mu_bar, real nu_bar) {
  check_n(n);
  const real g = std::sqrt(static_cast<real>(p.b));
  const real mu = rpow(p.sigma, -static_cast<real>(n)) * mu_bar;
  const real nu = rpow(p.sigma, -1.5L * n) / g * nu_bar - static_cast<real>(p.c) * rpow(p.lambda, n) +
                  rpow(p.sigma, -static_cast<real>(n));
  return {mu, nu};
}

std::pair<real, real> theta_n_inverse(const ModelParams& p, int n, real mu, real nu) {
  check_n(n);
  const real g = std::sqrt(static_cast<real>(p.b));
  const real mu_bar = rpow(p.sigma, n) * mu;
  const real nu_bar = g * rpow(p.sigma, 1.5L * n) *
                      (nu + static_cast<real>(p.c) * rpow(p.lambda, n) - rpow(p.sigma, -static_cast<real>(n)));
  return {mu_bar, nu_bar};
}

// ---------------------------------------------------------------------------

RenormalizedMap::RenormalizedMap(ModelParams params, int n, double mu_bar, double nu_bar,
                                 std::optional<Box2> linearization_box)
    : params_(params), mu_bar_(mu_bar), nu_bar_(nu_bar), box_(linearization_box) {
  params_.validate();
  if (n < 1) throw std::invalid_argument("renormalized map requires n >= 1");
  frame_ = frame(params_, n, mu_bar, nu_bar);
}

Evaluation RenormalizedMap::evaluate(const PointL& bar) const {
  Evaluation e;
  const real lambda = params_.lambda, sigma = params_.sigma;
  real x = 1 + frame_.x_scale * bar.x;
  real y = frame_.y_offset + frame_.y_scale * bar.y;
  auto inside = [&](int stage) {
    if (!box_ || e.escaped) return;
    if (!box_->contains({static_cast<double>(x), static_cast<double>(y)})) {
      e.escaped = true;
      e.escape_stage = stage;
    }
  };
  inside(0);
  for (int k = 1; k <= frame_.n; ++k) {
    x *= lambda;
    y *= sigma;
    inside(k);
  }
  const real t = y - 1;
  const real X = 1 + static_cast<real>(params_.a) * t;
  const real Y = -static_cast<real>(params_.b) * t * t * t + frame_.mu * t + frame_.nu +
                 static_cast<real>(params_.c) * x + params_.perturbation.h2(t);
  e.value = {(X - 1) / frame_.x_scale, (Y - frame_.y_offset) / frame_.y_scale};
  return e;
}

PointL RenormalizedMap::operator()(const PointL& bar) const { return evaluate(bar).value; }

PointL RenormalizedMap::inverse(const PointL& bar) const {
  if (params_.c == 0 || params_.a == 0) throw std::domain_error("renormalized map is not invertible when a or c is 0");
  const real X = 1 + frame_.x_scale * bar.x;
  const real Y = frame_.y_offset + frame_.y_scale * bar.y;
  const real t = (X - 1) / static_cast<real>(params_.a);
  const real x = (Y - (-static_cast<real>(params_.b) * t * t * t + frame_.mu * t + frame_.nu + params_.perturbation.h2(t))) /
                 static_cast<real>(params_.c);
  real px = x, py = 1 + t;
  const real lambda = params_.lambda, sigma = params_.sigma;
  for (int k = 0; k < frame_.n; ++k) {
    px /= lambda;
    py /= sigma;
  }
  return {(px - 1) / frame_.x_scale, (py - frame_.y_offset) / frame_.y_scale};
}

PointL RenormalizedMap::limit(const PointL& bar) const {
  const real y = bar.y;
  return {y, -y * y * y + static_cast<real>(mu_bar_) * y + static_cast<real>(nu_bar_)};
}

PointL RenormalizedMap::residual(const PointL& bar) const {
  PointL v = (*this)(bar), l = limit(bar);
  return {v.x - l.x, v.y - l.y};
}

real RenormalizedMap::expected_determinant() const {
  return -static_cast<real>(params_.a) * params_.c * std::pow(static_cast<real>(params_.lambda * params_.sigma), frame_.n);
}

planar::PlanarMap RenormalizedMap::as_planar() const {
  planar::PlanarMap m;
  m.name = "renormalized";
  m.params = {{"mu_bar", mu_bar_}, {"nu_bar", nu_bar_}, {"n", static_cast<double>(frame_.n)}};
  auto self = *this;
  m.forward = [self](const Vec2& v) { return to_vec(self(to_long(v))); };
  if (params_.c != 0) m.inverse = [self](const Vec2& v) { return to_vec(self.inverse(to_long(v))); };
  m.jacobian = [self](const Vec2& v) {
    // Derivatives of psi in closed form: x̄' = ȳ (a t / x_scale with t linear in ȳ) and
    // ȳ' from the N-step chain rule.
    const auto& f = self.frame_;
    const auto& p = self.params_;
    real sig_n = std::pow(static_cast<real>(p.sigma), f.n), lam_n = std::pow(static_cast<real>(p.lambda), f.n);
    const real y = sig_n * (f.y_offset + f.y_scale * v.y);
    const real t = y - 1;
    const real dt_dy = sig_n * f.y_scale;
    const real dX_dy = p.a * dt_dy;
    real dh2 = 0;
    if (p.perturbation.kind == Perturbation::Kind::quartic) dh2 = 4 * static_cast<real>(p.perturbation.epsilon) * t * t * t;
    const real dY_dt = -3 * static_cast<real>(p.b) * t * t + f.mu + dh2;
    const real dY_dx = static_cast<real>(p.c) * lam_n * f.x_scale;
    return Mat2{0.0, static_cast<double>(dX_dy / f.x_scale), static_cast<double>(dY_dx / f.y_scale),
                static_cast<double>(dY_dt * dt_dy / f.y_scale)};
  };
  return m;
}

planar::PlanarFamily renormalized_family(const ModelParams& p, int n) {
  planar::PlanarFamily fam{"renormalized", {"mu_bar", "nu_bar"}, {}};
  fam.member = [p, n](const planar::Params& q) { return RenormalizedMap(p, n, q[0], q[1]).as_planar(); };
  return fam;
}

// ---------------------------------------------------------------------------

ResidualNorm residual_norm(const ModelParams& p, int n, const ResidualOptions& o) {
  if (o.grid < 2 || o.parameter_grid < 1) throw std::invalid_argument("residual_norm: grid too small");
  const int pg = o.parameter_grid;
  const std::size_t count = static_cast<std::size_t>(pg) * pg;
  std::vector<ResidualNorm> partial(count);
  parallel_for(count, o.threads, [&](std::size_t k) {
    const int i = static_cast<int>(k % pg), j = static_cast<int>(k / pg);
    const double mu_bar = pg == 1 ? o.parameter_box.x_lo : o.parameter_box.x_lo + o.parameter_box.width() * i / (pg - 1);
    const double nu_bar = pg == 1 ? o.parameter_box.y_lo : o.parameter_box.y_lo + o.parameter_box.height() * j / (pg - 1);
    RenormalizedMap psi(p, n, mu_bar, nu_bar);
    ResidualNorm r;
    r.n = n;
    r.worst_mu_bar = mu_bar;
    r.worst_nu_bar = nu_bar;
    const real h = o.fd_step;
    for (int a = 0; a < o.grid; ++a) {
      for (int b = 0; b < o.grid; ++b) {
        PointL q{o.box.x_lo + o.box.width() * a / (o.grid - 1), o.box.y_lo + o.box.height() * b / (o.grid - 1)};
        PointL res = psi.residual(q);
        r.sup_h1 = std::max(r.sup_h1, static_cast<double>(std::abs(res.x)));
        r.sup_h2 = std::max(r.sup_h2, static_cast<double>(std::abs(res.y)));
        PointL xp = psi.residual({q.x + h, q.y}), xm = psi.residual({q.x - h, q.y});
        PointL yp = psi.residual({q.x, q.y + h}), ym = psi.residual({q.x, q.y - h});
        const real d1 = std::max(std::abs(xp.x - xm.x), std::abs(yp.x - ym.x)) / (2 * h);
        const real d2 = std::max(std::abs(xp.y - xm.y), std::abs(yp.y - ym.y)) / (2 * h);
        r.sup_dh1 = std::max(r.sup_dh1, static_cast<double>(d1));
        r.sup_dh2 = std::max(r.sup_dh2, static_cast<double>(d2));
      }
    }
    partial[k] = r;
  });
  ResidualNorm out = partial.front();
  for (const auto& r : partial) {
    if (r.sup() > out.sup()) {
      out.worst_mu_bar = r.worst_mu_bar;
      out.worst_nu_bar = r.worst_nu_bar;
    }
    out.sup_h1 = std::max(out.sup_h1, r.sup_h1);
    out.sup_h2 = std::max(out.sup_h2, r.sup_h2);
    out.sup_dh1 = std::max(out.sup_dh1, r.sup_dh1);
    out.sup_dh2 = std::max(out.sup_dh2, r.sup_dh2);
  }
  return out;
}

bool DecayFit::within(double tol) const { return std::abs(slope - predicted) <= tol; }

DecayFit fit_decay(const ModelParams& p, int n_lo, int n_hi, const ResidualOptions& options) {
  if (n_lo < 1 || n_hi <= n_lo) throw std::invalid_argument("fit_decay: need 1 <= n_lo < n_hi");
  DecayFit fit;
  for (int n = n_lo; n <= n_hi; ++n) fit.rows.push_back(residual_norm(p, n, options));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(fit.rows.size());
  for (const auto& r : fit.rows) {
    const double x = r.n, y = std::log(r.sup());
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / m;
  for (std::size_t i = 1; i < fit.rows.size(); ++i) fit.ratios.push_back(fit.rows[i].sup() / fit.rows[i - 1].sup());
  const bool unperturbed = p.perturbation.kind == Perturbation::Kind::none || p.perturbation.epsilon == 0.0;
  fit.predicted = std::log(unperturbed ? p.lambda * p.sigma : p.xi());
  return fit;
}

void write_residual_csv(std::ostream& os, const DecayFit& fit) {
  os << "n,mu_bar,nu_bar,sup_H1,sup_H2,ratio\n";
  os.precision(17);
  for (std::size_t i = 0; i < fit.rows.size(); ++i) {
    const auto& r = fit.rows[i];
    os << r.n << ',' << r.worst_mu_bar << ',' << r.worst_nu_bar << ',' << r.sup_h1 << ',' << r.sup_h2 << ',';
    if (i > 0) os << fit.ratios[i - 1];
    os << '\n';
  }
}

// ---------------------------------------------------------------------------

PointL standard_f(real mu_bar, real nu_bar, const PointL& p) {
  return {p.x * p.x * p.x - mu_bar * p.x - nu_bar + p.y, p.x};
}

PointL standard_f_inverse(real mu_bar, real nu_bar, const PointL& p) {
  return {p.y, p.x - p.y * p.y * p.y + mu_bar * p.y + nu_bar};
}

planar::PlanarMap conjugate_to_standard(const planar::PlanarMap& psi, double mu_bar, double nu_bar) {
  planar::PlanarMap m;
  m.name = "standard(" + psi.name + ")";
  m.params = psi.params;
  auto fwd = psi.forward;
  m.forward = [fwd, mu_bar, nu_bar](const Vec2& v) {
    PointL pre = standard_f_inverse(mu_bar, nu_bar, to_long(v));
    return to_vec(standard_f(mu_bar, nu_bar, to_long(fwd(to_vec(pre)))));
  };
  if (psi.inverse) {
    auto inv = psi.inverse;
    m.inverse = [inv, mu_bar, nu_bar](const Vec2& v) {
      PointL pre = standard_f_inverse(mu_bar, nu_bar, to_long(v));
      return to_vec(standard_f(mu_bar, nu_bar, to_long(inv(to_vec(pre)))));
    };
  }
  return m;
}

StandardFormParts standard_form_parts(const RenormalizedMap& psi, const PointL& tilde) {
  const real mu = psi.mu_bar(), nu = psi.nu_bar();
  PointL out = standard_f(mu, nu, psi(standard_f_inverse(mu, nu, tilde)));
  StandardFormParts parts;
  const real beta = std::pow(static_cast<real>(psi.params().xi()), psi.n());
  parts.beta = static_cast<double>(beta);
  parts.u = static_cast<double>(out.x / beta);
  const real base = -tilde.y * tilde.y * tilde.y + mu * tilde.y + tilde.x;
  parts.v = static_cast<double>((out.y - base) / beta);
  return parts;
}

nlohmann::json to_json(const ModelParams& p) {
  return {{"lambda", p.lambda}, {"sigma", p.sigma}, {"a", p.a}, {"b", p.b}, {"c", p.c},
          {"perturbation", p.perturbation.describe()}, {"xi", p.xi()}};
}

nlohmann::json to_json(const ResidualNorm& r) {
  return {{"n", r.n}, {"sup_H1", r.sup_h1}, {"sup_H2", r.sup_h2}, {"sup_dH1", r.sup_dh1}, {"sup_dH2", r.sup_dh2},
          {"worst_mu_bar", r.worst_mu_bar}, {"worst_nu_bar", r.worst_nu_bar}};
}

nlohmann::json to_json(const DecayFit& f) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : f.rows) rows.push_back(to_json(r));
  return {{"rows", rows}, {"ratios", f.ratios}, {"slope", f.slope}, {"intercept", f.intercept},
          {"predicted_log_rate", f.predicted}};
}

}  // namespace cubiclab::renorm
