#pragma once

#include "cubiclab/geometry.hpp"
#include "cubiclab/manifold.hpp"
#include "cubiclab/planar.hpp"
#include "cubiclab/renorm.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cubiclab::tangency {

// ---------------------------------------------------------------------------
// Fiber gaps between two curves
// ---------------------------------------------------------------------------

struct FiberSample {
  double u = 0;    // coordinate across fibers
  double v_u = 0;  // unstable curve along the fiber
  double v_s = 0;  // stable curve along the fiber
  double gap = 0;  // v_u - v_s
};

enum class Extremum { local_max, local_min };
std::string to_string(Extremum e);

struct GapEvent {
  Vec2 location;
  double fiber_coordinate = 0;
  double min_gap = 0;  // signed gap at the refined extremum
  Extremum extremum = Extremum::local_min;
  /// Oriented depth: +gap at a local maximum, -gap at a local minimum. It is
  /// positive exactly when the curves cross near the event.
  double depth = 0;
  double curvature_unstable = 0;  // second derivative along the fiber coordinate
  double curvature_stable = 0;
  double curvature_noise = 0;     // spread between two stencil widths
};

struct Detection {
  std::vector<GapEvent> events;
  std::vector<FiberSample> profile;
  int crossings = 0;
  bool rejected = false;
  std::string diagnostic;
};

/// Signed gaps on `fibers` parallel lines (direction `fiber_direction`,
/// default vertical) across `window`, interior extrema of the gap refined by
/// quadratic interpolation. A fiber meeting either curve more than once
/// inside the window rejects the window.
Detection detect_tangencies(const std::vector<Vec2>& unstable, const std::vector<Vec2>& stable, const Box2& window,
                            Vec2 fiber_direction = {0, 1}, int fibers = 401);

// ---------------------------------------------------------------------------
// Classification along a parameter curve
// ---------------------------------------------------------------------------

enum class Classification { contact_making, contact_breaking, transverse, withheld };
std::string to_string(Classification c);

struct TangencyEvent {
  double parameter = 0;
  Vec2 location;
  double min_gap = 0;
  double depth = 0;
  Extremum extremum = Extremum::local_min;
  double gap_slope = 0;     // Richardson-refined d(depth)/dt
  double slope_coarse = 0;  // step dt
  double slope_fine = 0;    // step dt/2
  bool richardson_consistent = false;
  double curvature_gap = 0;
  double curvature_noise = 0;
  Classification classification = Classification::withheld;
  std::string note;
};

/// Tracks the event at parameter t; nullopt when it is lost.
using Probe = std::function<std::optional<GapEvent>(double)>;

/// Contact-making iff the depth slope is positive; withheld below the noise
/// floor; transverse when the depth keeps one sign over [t0 - dt, t0 + dt].
TangencyEvent classify_tangency(const Probe& probe, double t0, double dt, double noise_floor = 1e-4);

// ---------------------------------------------------------------------------
// Velocities of the limit endomorphism
// ---------------------------------------------------------------------------

struct VelocityTable {
  double mu_bar = 3, nu_bar = 0, step = 1e-5;
  double y_plus = 0, y_minus = 0;  // ordinates of the 2-periodic points
  double dy_plus_dmu = 0, dy_minus_dmu = 0, dy_plus_dnu = 0, dy_minus_dnu = 0;
  double dFc_plus_dmu = 0, dFc_minus_dmu = 0, dFc_plus_dnu = 0, dFc_minus_dnu = 0;
  bool ok = true;
  std::string diagnostic;
};

/// Central differences of the period-2 ordinates (roots of F^2(y) = y near
/// +-2) and of the critical values F(c+-).
VelocityTable velocity_derivatives(double mu_bar = 3, double nu_bar = 0, double step = 1e-5);

// ---------------------------------------------------------------------------
// The tangency experiment on the renormalized family
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  renorm::ModelParams model;
  int n = 6;
  Box2 upper_window{0.6, 1.4, 1.5, 2.5};
  Box2 lower_window{-1.4, -0.6, -2.5, -1.5};
  int fibers = 401;
  manifold::GrowthControls controls{1e-5, 2e-3, 0.05, 2'000'000, 1e-6};
  double dt = 1e-3;
  double noise_floor = 1e-4;
  double reach = 1.6;  // manifolds are grown until |x| exceeds this
};

struct PeriodTwoPair {
  planar::SaddlePoint plus;   // near (-2, 2)
  planar::SaddlePoint minus;  // near (2, -2)
};

class TangencyExperiment {
 public:
  explicit TangencyExperiment(ExperimentConfig config);

  const ExperimentConfig& config() const { return config_; }
  double coupling() const { return config_.model.coupling(config_.n); }
  /// Measured sup of the residual at this n on [-2, 2]^2.
  double measured_residual() const { return residual_; }

  planar::PlanarMap map(double mu_bar, double nu_bar) const;
  /// std::runtime_error when Newton fails or a point is not a saddle.
  PeriodTwoPair saddles(double mu_bar, double nu_bar) const;

  manifold::ManifoldCurve unstable_plus(double mu_bar, double nu_bar) const;
  manifold::ManifoldCurve stable_plus(double mu_bar, double nu_bar) const;
  manifold::ManifoldCurve stable_minus(double mu_bar, double nu_bar) const;

  /// W^u(P+) against W^s(P+) near the maximum of the cubic.
  std::optional<GapEvent> upper(double mu_bar, double nu_bar) const;
  /// W^u(P+) against W^s(P-) near the minimum of the cubic.
  std::optional<GapEvent> lower(double mu_bar, double nu_bar) const;
  /// Upper event with W^u(P+) held at (mu0, nu0).
  std::optional<GapEvent> upper_frozen_unstable(double mu0, double nu0, double mu_bar, double nu_bar) const;

 private:
  ExperimentConfig config_;
  double residual_ = 0;
};

struct ScanRow {
  double t = 0;
  std::optional<double> upper_depth;
  std::optional<double> lower_depth;
};

struct ScanResult {
  double mu_bar = 0, nu_bar = 0;
  std::vector<ScanRow> rows;
  std::vector<TangencyEvent> events;
  std::vector<std::string> region;  // "upper" or "lower", per event
};

/// Scans c(t) = (mu_bar, nu_bar + t) over `samples` points of [t_lo, t_hi];
/// each sign change of a depth is bisected and classified.
ScanResult scan(const TangencyExperiment& ex, double mu_bar, double nu_bar, double t_lo, double t_hi, int samples,
                unsigned threads = 1);

struct LocusFit {
  std::vector<double> mu_bar;
  std::vector<double> nu_bar;
  std::vector<double> skipped;  // grid values where the locus was lost
  double slope = 0;
  bool strictly_decreasing = false;
};

/// For each mu_bar on the grid, the nu_bar in [nu_lo, nu_hi] where the upper
/// depth vanishes, and the least-squares slope of nu_bar(mu_bar). With
/// `frozen` set the unstable curve stays at (mu0, nu0).
LocusFit f_bar_slope(const TangencyExperiment& ex, const std::vector<double>& mu_grid, double nu_lo, double nu_hi,
                     unsigned threads = 1, std::optional<std::pair<double, double>> frozen = std::nullopt);

/// Columns: t,region,x,y,min_gap,gap_slope,classification
void write_events_csv(std::ostream& os, const ScanResult& r);

nlohmann::json to_json(const TangencyEvent& e);
nlohmann::json to_json(const VelocityTable& v);
nlohmann::json to_json(const LocusFit& f);

}  // namespace cubiclab::tangency
