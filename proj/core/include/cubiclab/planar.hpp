#pragma once

#include "cubiclab/geometry.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cubiclab::planar {

using Params = std::vector<double>;

/// A concrete planar map: a family member with its parameters bound.
struct PlanarMap {
  std::string name;
  std::map<std::string, double> params;
  std::function<Vec2(const Vec2&)> forward;
  std::function<Vec2(const Vec2&)> inverse;    // may be empty
  std::function<Mat2(const Vec2&)> jacobian;   // may be empty

  Vec2 operator()(const Vec2& p) const { return forward(p); }
  bool has_inverse() const { return static_cast<bool>(inverse); }
  /// Analytic Jacobian when present, otherwise central differences.
  Mat2 jacobian_at(const Vec2& p) const;
  Mat2 finite_difference_jacobian(const Vec2& p, double h = 1e-6) const;
  /// period-fold composition.
  Vec2 power(const Vec2& p, int period) const;
  Mat2 power_jacobian(const Vec2& p, int period) const;
};

/// A parameterized family; `member` binds parameter values in the order of
/// `parameter_names`.
struct PlanarFamily {
  std::string name;
  std::vector<std::string> parameter_names;
  std::function<PlanarMap(const Params&)> member;

  PlanarMap operator()(const Params& p) const;
};

/// (lambda x, sigma y); parameters {lambda, sigma}.
PlanarFamily linear_family();
/// (b y, -y^3 + a y + x); parameters {a, b}. Inverse y = x'/b, x = y' + y^3 - a y.
PlanarFamily cubic_henon_family();
/// (y, -y^3 + mu_bar y + nu_bar); parameters {mu_bar, nu_bar}. Not invertible.
PlanarFamily limit_endomorphism_family();

// ---------------------------------------------------------------------------

struct Orbit {
  std::vector<Vec2> points;  // successive images, start excluded
  bool escaped = false;
  bool non_finite = false;
  long steps_completed = 0;
  Vec2 last;
};

/// `bailout` bounds the Euclidean norm. With keep_points false only `last`
/// and the flags are filled.
Orbit iterate(const PlanarMap& map, Vec2 start, long steps, double bailout = 1e6, bool keep_points = true);

enum class Spectrum { saddle, sink, source, non_hyperbolic, complex_pair };
std::string to_string(Spectrum s);

struct SaddlePoint {
  Vec2 location;
  int period = 1;
  std::array<double, 2> eigenvalues{};  // unstable first when a saddle
  std::array<Vec2, 2> eigenvectors{};
  Spectrum spectrum = Spectrum::non_hyperbolic;
  Eigen2 eigen;
  double residual = 0.0;

  bool is_saddle() const { return spectrum == Spectrum::saddle; }
  Vec2 unstable_direction() const { return eigenvectors[0]; }
  Vec2 stable_direction() const { return eigenvectors[1]; }
};

struct SaddleSearch {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  Vec2 last_iterate;
  std::optional<SaddlePoint> point;  // set when converged; check spectrum
  std::string diagnostic;
};

/// Newton on map^period - id. Reports divergence with the last iterate
/// after max_iter steps; a non-saddle spectrum is reported in point->spectrum.
SaddleSearch find_saddle(const PlanarMap& map, int period, Vec2 seed, double tol = 1e-12, int max_iter = 100);

SaddlePoint classify_point(const PlanarMap& map, Vec2 location, int period);

/// Newton from every node of an n x n seed grid over `box`; converged points
/// of minimal period `period` inside the box, deduplicated by orbit and
/// represented by the lexicographically smallest orbit point.
std::vector<SaddlePoint> find_periodic_points(const PlanarMap& map, int period, const Box2& box, int grid = 50,
                                              double tol = 1e-12, unsigned threads = 1);

struct LyapunovEstimate {
  bool bounded = true;
  double exponent = 0.0;
  double last_quarter = 0.0;  // average over the final quarter of the run
  double drift = 0.0;         // |last_quarter - exponent|
  long steps = 0;
  Vec2 final_point;
};

/// Top exponent by tangent-vector renormalization. Requires steps >= 10^4.
LyapunovEstimate lyapunov(const PlanarMap& map, Vec2 start, long steps, long discard, double bailout = 1e3);

nlohmann::json to_json(const SaddlePoint& s);
nlohmann::json to_json(const LyapunovEstimate& l);

}  // namespace cubiclab::planar
