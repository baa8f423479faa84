#pragma once

#include "cubiclab/interval.hpp"
#include "cubiclab/maps1d.hpp"
#include "cubiclab/rational.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cubiclab::cantor {

enum class Source { km_construction, markov_system, image, explicit_list };

std::string to_string(Source s);

/// One generation of a Cantor-set construction: an ambient interval and the
/// surviving closed subintervals, ordered left to right.
template <class T>
struct CantorApproximation {
  Interval<T> ambient;
  std::vector<Interval<T>> intervals;
  int generation = 0;
  Source source = Source::explicit_list;
  std::string label;

  /// Throws std::logic_error unless intervals are nonempty, strictly ordered,
  /// pairwise disjoint and inside the ambient interval.
  void validate() const;
  Interval<T> hull() const { return {intervals.front().lo, intervals.back().hi}; }
  std::size_t size() const { return intervals.size(); }
};

using ExactCantor = CantorApproximation<Rational>;
using FloatCantor = CantorApproximation<double>;

FloatCantor to_float(const ExactCantor& k);

/// x -> a x + b applied endpoint-wise (a != 0), exact.
ExactCantor affine_image(const ExactCantor& k, const Rational& a, const Rational& b);

// ---------------------------------------------------------------------------
// Thickness
// ---------------------------------------------------------------------------

template <class T>
struct EndpointRatio {
  T point;
  bool bridge_on_left = false;  // bridge extends to the left of `point`
  Interval<T> gap;
  Interval<T> bridge;
  T ratio;
};

template <class T>
struct ThicknessReport {
  T thickness;
  Interval<T> witness_gap;
  Interval<T> witness_bridge;
  std::vector<EndpointRatio<T>> ratios;  // two per gap, in gap order
};

/// Minimum over gap endpoints of Length(bridge) / Length(gap). A bridge stops
/// at the first gap whose length is at least the current gap's, or at the
/// ambient boundary. Throws std::domain_error with fewer than two intervals or
/// no gaps.
template <class T>
ThicknessReport<T> thickness(const CantorApproximation<T>& k);

// ---------------------------------------------------------------------------
// The affine Cantor sets K_m of the N-map
// ---------------------------------------------------------------------------

struct KmConstruction {
  int m = 0;
  Rational q0;
  Rational x_m;                           // (1 - 3^{-(m-2)}) / 2
  std::vector<Rational> orbit;            // q_0 .. q_{m-1}
  std::map<int, Rational> backward;       // q~_i for i in {0, 3, ..., m-1}
  std::vector<Interval<Rational>> first_generation_by_label;  // I_0 .. I_{m-1}
  std::vector<ExactCantor> generations;   // generations[g - 1] is generation g
  std::vector<std::string> ordering_chain;  // names of the checked point chain

  /// Length of the gap (q_0, q~_0) realized by the construction.
  Rational realized_gap() const { return backward.at(0) - q0; }
  /// The closed form 22 / (3^m - 1) quoted for that gap.
  Rational quoted_gap() const;
  /// (3^m - 45) / 22.
  Rational quoted_thickness_bound() const;
};

/// Exact construction of K_m through `generations` refinement steps.
/// Throws std::invalid_argument unless m is even and >= 6 and generations >= 1,
/// and std::logic_error naming the violated relation if the point ordering of
/// the construction fails.
KmConstruction construct_km(int m, int generations);

/// Generation g of K_m.
ExactCantor build_Km(int m, int generation);

/// Preimage refinement K^(1) cap S^{-1}(current) using the three global
/// inverse branches of the N-map.
ExactCantor refine_with_nmap(const ExactCantor& first_generation, const ExactCantor& current);

// ---------------------------------------------------------------------------
// Gap Lemma
// ---------------------------------------------------------------------------

enum class GapLemmaVerdict { first_in_gap_of_second, second_in_gap_of_first, intervals_intersect, inconclusive };

std::string to_string(GapLemmaVerdict v);

struct GapLemmaReport {
  GapLemmaVerdict verdict = GapLemmaVerdict::inconclusive;
  int generations_checked = 0;
  int first_disjoint_generation = -1;  // linked families without overlap
  bool outside_hull = false;           // containment is in an unbounded component
  std::optional<Rational> thickness_product;
  bool violates_gap_lemma = false;     // product > 1 yet linked and disjoint
  std::string detail;
};

bool families_overlap(const ExactCantor& a, const ExactCantor& b);

/// Whether the hull of `inner` lies in a single component of the complement
/// of `outer`. Sets *unbounded when that component is outside outer's hull.
bool contained_in_gap(const ExactCantor& inner, const ExactCantor& outer, bool* unbounded = nullptr);

GapLemmaReport gap_lemma_check(const ExactCantor& a, const ExactCantor& b);

/// Finite-generation check: generation lists must have equal length and be
/// ordered coarse to fine.
GapLemmaReport gap_lemma_check(const std::vector<ExactCantor>& a, const std::vector<ExactCantor>& b);

// ---------------------------------------------------------------------------
// Dynamically defined Cantor sets from Markov branch systems
// ---------------------------------------------------------------------------

struct MarkovBranch {
  Interval<Rational> domain;
  maps1d::AffineMap map;
};

struct MarkovBranchSystem {
  Interval<Rational> ambient;
  std::vector<MarkovBranch> branches;
};

struct BranchDiagnostic {
  std::size_t index = 0;
  std::string problem;
};

struct MarkovCantorResult {
  std::optional<ExactCantor> set;
  std::vector<BranchDiagnostic> diagnostics;
  bool ok() const { return set.has_value(); }
};

MarkovCantorResult markov_cantor(const MarkovBranchSystem& system, int generation);

/// Branch system whose domains are the first-generation intervals of K_m,
/// each carrying the N-map branch that covers it.
MarkovBranchSystem km_branch_system(const KmConstruction& km);

// ---------------------------------------------------------------------------
// Images under monotone smooth maps
// ---------------------------------------------------------------------------

struct MonotoneMap {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;
};

MonotoneMap conjugacy_map();  // h(x) = 2 sin(pi x / 3)

/// Endpoint-wise image. Throws std::invalid_argument when a sampled grid over
/// the ambient interval shows the map is not strictly monotone.
FloatCantor image_cantor(const FloatCantor& k, const MonotoneMap& map, int samples = 1000);

struct ImageThicknessCheck {
  double source_thickness = 0.0;
  double image_thickness = 0.0;
  double delta = 0.0;
  double distortion = 0.0;  // max h' / min h' over the trimmed ambient
  double bound = 0.0;       // source_thickness / max(distortion, 4)
  bool holds = false;
};

/// Default delta is 1/100 of the ambient length.
ImageThicknessCheck image_thickness_check(const FloatCantor& k, const MonotoneMap& map,
                                          std::optional<double> delta = std::nullopt);

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// Columns: generation,left_num,left_den,right_num,right_den
void write_intervals_csv(std::ostream& os, const std::vector<ExactCantor>& generations);
std::vector<ExactCantor> read_intervals_csv(std::istream& is);

nlohmann::json to_json(const ExactCantor& k);
nlohmann::json to_json(const FloatCantor& k);
nlohmann::json to_json(const ThicknessReport<Rational>& r);
nlohmann::json to_json(const ThicknessReport<double>& r);
nlohmann::json to_json(const GapLemmaReport& r);

}  // namespace cubiclab::cantor
