#pragma once

#include "cubiclab/geometry.hpp"
#include "cubiclab/planar.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace cubiclab::manifold {

enum class Kind { stable, unstable };
std::string to_string(Kind k);

struct GrowthControls {
  double h_min = 1e-5;
  double h_max = 1e-2;
  double angle_max = 0.2;
  std::size_t budget = 2'000'000;
  double seed_distance = 1e-6;
};

/// Polyline approximation of one branch of a stable or unstable manifold.
struct ManifoldCurve {
  Kind kind = Kind::unstable;
  planar::SaddlePoint base;
  int side = 1;                     // which half of the eigendirection
  std::vector<Vec2> points;         // starts at the saddle
  std::vector<double> arclength;    // cumulative, same size as points
  std::vector<double> parameter;    // fundamental-domain coordinate s of each point
  bool truncated = false;           // budget or resolution exhausted
  bool stopped = false;             // caller predicate fired
  std::string stop_reason;

  double length() const { return arclength.empty() ? 0.0 : arclength.back(); }
};

/// Grows a branch by iterating a linear fundamental domain: the point with
/// coordinate s is M^floor(s) applied to P + d Lambda^frac(s) v, where M is the
/// period map (its inverse for stable branches, squared when the eigenvalue is
/// negative). Steps in s adapt so spacing stays in [h_min, h_max] and the
/// turning angle stays below angle_max. Growth ends at target arclength, the
/// point budget, or when `stop` returns true for a new point.
ManifoldCurve grow_manifold(const planar::PlanarMap& map, const planar::SaddlePoint& saddle, Kind kind,
                            double target_arclength, int side = 1, const GrowthControls& controls = {},
                            const std::function<bool(const Vec2&)>& stop = {});

/// Distance from p to the polyline.
double distance_to_polyline(const std::vector<Vec2>& polyline, const Vec2& p);

/// Maximum over every `stride`-th point of `curve` of the
/// distance from map(point) to the polyline. Inverse map is used for stable curves.
double invariance_defect(const planar::PlanarMap& map, const ManifoldCurve& curve, std::size_t stride = 1);

/// Columns: x,y
void write_polyline_csv(std::ostream& os, const std::vector<Vec2>& points);

}  // namespace cubiclab::manifold
