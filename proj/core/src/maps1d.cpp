#include "cubiclab/maps1d.hpp"

#include "cubiclab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cubiclab::maps1d {

Rational AffineMap::fixed_point() const {
  if (slope == 1) throw std::domain_error("affine map with slope 1 has no unique fixed point");
  return intercept / (Rational(1) - slope);
}

bool AffinePiece::contains(const Rational& x) const {
  const bool above = lo_closed ? x >= domain.lo : x > domain.lo;
  const bool below = hi_closed ? x <= domain.hi : x < domain.hi;
  return above && below;
}

bool AffinePiece::contains(double x) const {
  const double lo = to_double(domain.lo);
  const double hi = to_double(domain.hi);
  const bool above = lo_closed ? x >= lo : x > lo;
  const bool below = hi_closed ? x <= hi : x < hi;
  return above && below;
}

const Rational& NMap::lower() {
  static const Rational v(-3, 2);
  return v;
}

const Rational& NMap::upper() {
  static const Rational v(3, 2);
  return v;
}

const std::array<AffinePiece, 3>& NMap::pieces() {
  // -3x-3 on [-3/2,-1/2), 3x on [-1/2,1/2], -3x+3 on (1/2,3/2]
  static const std::array<AffinePiece, 3> p{{
      {NBranch::left, {Rational(-3), Rational(-3)}, {Rational(-3, 2), Rational(-1, 2)}, true, false},
      {NBranch::middle, {Rational(3), Rational(0)}, {Rational(-1, 2), Rational(1, 2)}, true, true},
      {NBranch::right, {Rational(-3), Rational(3)}, {Rational(1, 2), Rational(3, 2)}, false, true},
  }};
  return p;
}

const AffinePiece& NMap::piece(NBranch b) { return pieces()[static_cast<int>(b) - 1]; }

NBranch NMap::branch_of(const Rational& x) {
  for (const auto& p : pieces())
    if (p.contains(x)) return p.branch;
  throw std::domain_error("N-map argument " + to_string(x) + " outside [-3/2, 3/2]");
}

NBranch NMap::branch_of(double x) {
  for (const auto& p : pieces())
    if (p.contains(x)) return p.branch;
  std::ostringstream os;
  os << "N-map argument " << x << " outside [-3/2, 3/2]";
  throw std::domain_error(os.str());
}

Rational NMap::eval(const Rational& x) { return piece(branch_of(x)).map(x); }

double NMap::eval(double x) {
  switch (branch_of(x)) {
    case NBranch::left: return -3.0 * x - 3.0;
    case NBranch::middle: return 3.0 * x;
    case NBranch::right: return -3.0 * x + 3.0;
  }
  return 0.0;
}

AffineMap compose_itinerary(const std::vector<NBranch>& itinerary) {
  AffineMap total;
  for (NBranch b : itinerary) total = NMap::piece(b).map.after(total);
  return total;
}

Rational exact_periodic_point(const std::vector<NBranch>& itinerary) {
  if (itinerary.empty()) throw std::invalid_argument("empty itinerary");
  const Rational q = compose_itinerary(itinerary).fixed_point();
  Rational x = q;
  for (std::size_t i = 0; i < itinerary.size(); ++i) {
    const auto& p = NMap::piece(itinerary[i]);
    if (!p.contains(x)) {
      std::ostringstream os;
      os << "itinerary step " << i << ": point " << to_string(x) << " not in domain of S"
         << static_cast<int>(itinerary[i]);
      throw std::logic_error(os.str());
    }
    x = p.map(x);
  }
  if (x != q) throw std::logic_error("composed itinerary does not close");
  return q;
}

std::vector<NBranch> itinerary_of(double x, int steps) {
  std::vector<NBranch> out;
  out.reserve(static_cast<std::size_t>(std::max(steps, 0)));
  for (int i = 0; i < steps; ++i) {
    out.push_back(NMap::branch_of(x));
    x = NMap::eval(x);
  }
  return out;
}

double cubic_eval(const CubicMap& map, double y, int order) {
  if (order < 0 || order > 3) throw std::invalid_argument("cubic_eval: order must be in 0..3");
  return map.derivative(y, order);
}

std::pair<double, double> critical_points(const CubicMap& map) {
  if (!(map.mu_bar > 0.0))
    throw std::domain_error("cubic map has no real critical pair for mu_bar <= 0");
  const double c = std::sqrt(map.mu_bar / 3.0);
  return {-c, c};
}

double iterate(const CubicMap& map, double y, int k) {
  for (int i = 0; i < k; ++i) y = map(y);
  return y;
}

double conjugacy_h(double x) { return 2.0 * std::sin(std::numbers::pi * x / 3.0); }

double conjugacy_h_derivative(double x) {
  return 2.0 * std::numbers::pi / 3.0 * std::cos(std::numbers::pi * x / 3.0);
}

double conjugacy_defect(double x) {
  static const CubicMap f{3.0, 0.0};
  return std::abs(conjugacy_h(NMap::eval(x)) - f(conjugacy_h(x)));
}

double schwarzian(const CubicMap& map, double y) {
  const double d1 = map.derivative(y, 1);
  if (d1 == 0.0) throw std::domain_error("Schwarzian undefined at a critical point");
  const double d2 = map.derivative(y, 2);
  const double d3 = map.derivative(y, 3);
  const double r = d2 / d1;
  return d3 / d1 - 1.5 * r * r;
}

double schwarzian_closed_form(double mu_bar, double y) {
  const double den = -3.0 * y * y + mu_bar;
  return -6.0 * (6.0 * y * y + mu_bar) / (den * den);
}

Map1D as_map1d(const CubicMap& map) {
  std::ostringstream os;
  os << "cubic(mu_bar=" << map.mu_bar << ", nu_bar=" << map.nu_bar << ")";
  return {os.str(), [map](double y) { return map(y); },
          [map](double y) { return map.derivative(y, 1); }};
}

Map1D nmap_as_map1d() {
  return {"N-map", [](double x) { return NMap::eval(x); },
          [](double x) { return NMap::branch_of(x) == NBranch::middle ? 3.0 : -3.0; }};
}

namespace {

double power(const Map1D& map, double y, int k) {
  for (int i = 0; i < k && std::isfinite(y); ++i) y = map.f(y);
  return y;
}

struct Root {
  double y;
  bool resolved;
  double lo, hi;
};

}  // namespace

PeriodicSearchResult find_periodic(const Map1D& map, int period, const Interval<double>& domain,
                                   double tol, const PeriodicSearchOptions& options) {
  if (period < 1) throw std::invalid_argument("find_periodic: period must be >= 1");
  if (!(domain.hi > domain.lo)) throw std::invalid_argument("find_periodic: empty domain");

  const double density = (options.cells_per_unit > 0.0 ? options.cells_per_unit
                                                       : 4.0 * std::pow(3.0, period)) *
                         options.oversample;
  const auto cells = static_cast<std::size_t>(std::ceil(domain.length() * density));
  const double width = domain.length() / static_cast<double>(cells);

  auto g = [&](double y) {
    // Points that leave the map's domain terminate the orbit.
    try {
      return power(map, y, period) - y;
    } catch (const std::domain_error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  std::vector<double> grid(cells + 1);
  parallel_for(cells + 1, options.threads, [&](std::size_t i) {
    const double y = i == cells ? domain.hi : domain.lo + static_cast<double>(i) * width;
    grid[i] = g(y);
  });

  std::vector<std::vector<Root>> per_cell(cells);
  parallel_for(cells, options.threads, [&](std::size_t i) {
    double lo = i == 0 ? domain.lo : domain.lo + static_cast<double>(i) * width;
    double hi = i + 1 == cells ? domain.hi : domain.lo + static_cast<double>(i + 1) * width;
    double glo = grid[i];
    double ghi = grid[i + 1];
    if (glo == 0.0) {
      per_cell[i].push_back({lo, true, lo, lo});
      return;
    }
    if (!std::isfinite(glo) || !std::isfinite(ghi)) {
      if (std::isfinite(glo) != std::isfinite(ghi)) per_cell[i].push_back({0.5 * (lo + hi), false, lo, hi});
      return;
    }
    if ((glo < 0.0) == (ghi < 0.0) || ghi == 0.0) return;
    while (hi - lo > options.polish_width) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double gm = g(mid);
      if (!std::isfinite(gm)) {
        per_cell[i].push_back({mid, false, lo, hi});
        return;
      }
      if (gm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((gm < 0.0) == (glo < 0.0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    per_cell[i].push_back({0.5 * (lo + hi), true, lo, hi});
  });

  PeriodicSearchResult result;
  result.cells = cells;
  std::vector<PeriodicOrbit1D> candidates;
  for (const auto& roots : per_cell) {
    for (const auto& r : roots) {
      if (!r.resolved) {
        result.unresolved.push_back({r.lo, r.hi, "orbit left the map domain or became non-finite"});
        continue;
      }
      std::vector<double> pts{r.y};
      double multiplier = 1.0;
      bool finite = true;
      double y = r.y;
      for (int k = 0; k < period; ++k) {
        try {
          multiplier *= map.df(y);
          y = map.f(y);
        } catch (const std::domain_error&) {
          finite = false;
          break;
        }
        if (k + 1 < period) pts.push_back(y);
      }
      if (!finite || !std::isfinite(y)) {
        result.unresolved.push_back({r.lo, r.hi, "orbit left the map domain"});
        continue;
      }
      const double closure = std::abs(y - r.y);
      if (closure > tol) {
        result.unresolved.push_back({r.lo, r.hi, "closure residual above tolerance"});
        continue;
      }
      bool minimal = true;
      for (int d = 1; d < period && minimal; ++d)
        if (period % d == 0 && std::abs(pts[static_cast<std::size_t>(d)] - r.y) <= tol) minimal = false;
      if (!minimal) continue;
      std::rotate(pts.begin(), std::min_element(pts.begin(), pts.end()), pts.end());
      candidates.push_back({std::move(pts), period, multiplier, closure});
    }
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const auto& a, const auto& b) { return a.points.front() < b.points.front(); });
  const double merge_tol = std::max(tol, 1e-9);
  for (auto& c : candidates) {
    if (!result.orbits.empty() &&
        std::abs(result.orbits.back().points.front() - c.points.front()) <= merge_tol) {
      if (c.closure_error < result.orbits.back().closure_error) result.orbits.back() = std::move(c);
      continue;
    }
    result.orbits.push_back(std::move(c));
  }
  return result;
}

}  // namespace cubiclab::maps1d
