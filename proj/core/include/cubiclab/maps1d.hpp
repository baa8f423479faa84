#pragma once

#include "cubiclab/interval.hpp"
#include "cubiclab/rational.hpp"

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cubiclab::maps1d {

// ---------------------------------------------------------------------------
// N-map: the piecewise-affine map on [-3/2, 3/2] with slopes -3, 3, -3.
// ---------------------------------------------------------------------------

enum class NBranch { left = 1, middle = 2, right = 3 };

/// Exact affine map x -> slope * x + intercept.
struct AffineMap {
  Rational slope{1};
  Rational intercept{0};

  Rational operator()(const Rational& x) const { return slope * x + intercept; }
  Rational preimage(const Rational& y) const { return (y - intercept) / slope; }
  /// (*this) o inner
  AffineMap after(const AffineMap& inner) const {
    return {slope * inner.slope, slope * inner.intercept + intercept};
  }
  /// Unique fixed point; throws std::domain_error when slope == 1.
  Rational fixed_point() const;
};

/// One branch of the N-map with its half-open/closed domain.
struct AffinePiece {
  NBranch branch;
  AffineMap map;
  Interval<Rational> domain;
  bool lo_closed;
  bool hi_closed;

  bool contains(const Rational& x) const;
  bool contains(double x) const;
};

class NMap {
 public:
  static const Rational& lower();  // -3/2
  static const Rational& upper();  //  3/2
  static const std::array<AffinePiece, 3>& pieces();
  static const AffinePiece& piece(NBranch b);

  /// Branch whose domain holds x; throws std::domain_error outside [-3/2, 3/2].
  static NBranch branch_of(const Rational& x);
  static NBranch branch_of(double x);

  static Rational eval(const Rational& x);
  static double eval(double x);
};

inline Rational nmap_eval(const Rational& x) { return NMap::eval(x); }
inline double nmap_eval(double x) { return NMap::eval(x); }

/// Composition of branch maps; itinerary[0] is applied first.
AffineMap compose_itinerary(const std::vector<NBranch>& itinerary);

/// Exact periodic point of the N-map with the given itinerary. Every
/// intermediate point is checked against its branch domain; a mismatch throws
/// std::logic_error naming the step.
Rational exact_periodic_point(const std::vector<NBranch>& itinerary);

/// Branch sequence visited by the float orbit of x (length `steps`).
std::vector<NBranch> itinerary_of(double x, int steps);

// ---------------------------------------------------------------------------
// Cubic family F(y) = -y^3 + mu_bar * y + nu_bar.
// ---------------------------------------------------------------------------

template <class T>
struct BasicCubicMap {
  T mu_bar{};
  T nu_bar{};

  T operator()(const T& y) const { return -y * y * y + mu_bar * y + nu_bar; }

  /// order-th derivative, order in 0..3.
  T derivative(const T& y, int order) const {
    switch (order) {
      case 0: return (*this)(y);
      case 1: return T(-3) * y * y + mu_bar;
      case 2: return T(-6) * y;
      case 3: return T(-6);
      default: throw std::invalid_argument("derivative order must be in 0..3");
    }
  }
};

using CubicMap = BasicCubicMap<double>;
using ExactCubicMap = BasicCubicMap<Rational>;

double cubic_eval(const CubicMap& map, double y, int order);

/// (-sqrt(mu/3), +sqrt(mu/3)); std::domain_error when mu_bar <= 0.
std::pair<double, double> critical_points(const CubicMap& map);

/// k-fold iterate.
double iterate(const CubicMap& map, double y, int k);

/// Conjugating homeomorphism h(x) = 2 sin(pi x / 3) from [-3/2,3/2] to [-2,2].
double conjugacy_h(double x);
double conjugacy_h_derivative(double x);

/// |h(S(x)) - F_{3,0}(h(x))|.
double conjugacy_defect(double x);

/// F'''/F' - (3/2)(F''/F')^2; std::domain_error at a critical point.
double schwarzian(const CubicMap& map, double y);
/// -6 (6y^2 + mu) / (-3y^2 + mu)^2.
double schwarzian_closed_form(double mu_bar, double y);

// ---------------------------------------------------------------------------
// Periodic orbits of a general interval map.
// ---------------------------------------------------------------------------

struct Map1D {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;
};

Map1D as_map1d(const CubicMap& map);
Map1D nmap_as_map1d();

struct PeriodicOrbit1D {
  std::vector<double> points;  // starts at the smallest point
  int period = 0;
  double multiplier = 0.0;
  double closure_error = 0.0;
};

struct UnresolvedBracket {
  double lo = 0.0;
  double hi = 0.0;
  std::string reason;
};

struct PeriodicSearchOptions {
  /// Grid cells per unit length; 0 selects 4 * 3^period.
  double cells_per_unit = 0.0;
  /// Multiplies the cell density.
  double oversample = 1.0;
  /// Bisection stops at this bracket width.
  double polish_width = 1e-14;
  unsigned threads = 1;
};

struct PeriodicSearchResult {
  std::vector<PeriodicOrbit1D> orbits;  // sorted by smallest point
  std::vector<UnresolvedBracket> unresolved;
  std::size_t cells = 0;
};

/// All minimal period-p orbits with a point in `domain`: sign changes of
/// F^p(y) - y on a uniform grid, bisection polishing, deduplication by orbit.
PeriodicSearchResult find_periodic(const Map1D& map, int period, const Interval<double>& domain,
                                   double tol, const PeriodicSearchOptions& options = {});

}  // namespace cubiclab::maps1d
