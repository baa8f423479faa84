#include "cubiclab/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cubiclab::cantor {

using maps1d::AffineMap;
using maps1d::NBranch;
using maps1d::NMap;

std::string to_string(Source s) {
  switch (s) {
    case Source::km_construction: return "km_construction";
    case Source::markov_system: return "markov_system";
    case Source::image: return "image";
    case Source::explicit_list: return "explicit_list";
  }
  return "unknown";
}

std::string to_string(GapLemmaVerdict v) {
  switch (v) {
    case GapLemmaVerdict::first_in_gap_of_second: return "first_in_gap_of_second";
    case GapLemmaVerdict::second_in_gap_of_first: return "second_in_gap_of_first";
    case GapLemmaVerdict::intervals_intersect: return "intervals_intersect";
    case GapLemmaVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

template <class T>
void CantorApproximation<T>::validate() const {
  if (intervals.empty()) throw std::logic_error("Cantor approximation has no intervals");
  if (ambient.lo > ambient.hi) throw std::logic_error("ambient interval is reversed");
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& iv = intervals[i];
    if (iv.lo > iv.hi) throw std::logic_error("interval " + std::to_string(i) + " is reversed");
    if (!ambient.contains(iv)) throw std::logic_error("interval " + std::to_string(i) + " leaves the ambient interval");
    if (i > 0 && !(intervals[i - 1].hi < iv.lo))
      throw std::logic_error("intervals " + std::to_string(i - 1) + " and " + std::to_string(i) +
                             " are not strictly ordered");
  }
}

template struct CantorApproximation<Rational>;
template struct CantorApproximation<double>;

FloatCantor to_float(const ExactCantor& k) {
  FloatCantor out;
  out.ambient = {to_double(k.ambient.lo), to_double(k.ambient.hi)};
  out.intervals.reserve(k.size());
  for (const auto& iv : k.intervals) out.intervals.push_back({to_double(iv.lo), to_double(iv.hi)});
  out.generation = k.generation;
  out.source = k.source;
  out.label = k.label;
  return out;
}

ExactCantor affine_image(const ExactCantor& k, const Rational& a, const Rational& b) {
  if (a == 0) throw std::invalid_argument("affine_image: slope must be nonzero");
  auto map = [&](const Interval<Rational>& iv) {
    Rational x = a * iv.lo + b, y = a * iv.hi + b;
    return a > 0 ? Interval<Rational>{x, y} : Interval<Rational>{y, x};
  };
  ExactCantor out = k;
  out.ambient = map(k.ambient);
  out.intervals.clear();
  for (const auto& iv : k.intervals) out.intervals.push_back(map(iv));
  if (a < 0) std::reverse(out.intervals.begin(), out.intervals.end());
  return out;
}

// ---------------------------------------------------------------------------

template <class T>
ThicknessReport<T> thickness(const CantorApproximation<T>& k) {
  if (k.size() < 2) throw std::domain_error("thickness is undefined for fewer than two intervals");
  std::vector<Interval<T>> gaps;
  gaps.reserve(k.size() - 1);
  for (std::size_t i = 1; i < k.size(); ++i) gaps.push_back({k.intervals[i - 1].hi, k.intervals[i].lo});
  const std::size_t n = gaps.size();
  std::vector<T> len(n);
  for (std::size_t i = 0; i < n; ++i) len[i] = gaps[i].length();

  // Nearest blocking gap (length >= own) on each side, by monotonic stack.
  const std::size_t none = n;
  std::vector<std::size_t> left(n, none), right(n, none), stack;
  stack.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    while (!stack.empty() && len[stack.back()] < len[i]) stack.pop_back();
    if (!stack.empty()) left[i] = stack.back();
    stack.push_back(i);
  }
  stack.clear();
  for (std::size_t i = n; i-- > 0;) {
    while (!stack.empty() && len[stack.back()] < len[i]) stack.pop_back();
    if (!stack.empty()) right[i] = stack.back();
    stack.push_back(i);
  }

  ThicknessReport<T> report;
  report.ratios.reserve(2 * n);
  bool first = true;
  for (std::size_t i = 0; i < n; ++i) {
    Interval<T> lb{left[i] == none ? k.ambient.lo : gaps[left[i]].hi, gaps[i].lo};
    Interval<T> rb{gaps[i].hi, right[i] == none ? k.ambient.hi : gaps[right[i]].lo};
    for (int side = 0; side < 2; ++side) {
      const Interval<T>& b = side == 0 ? lb : rb;
      EndpointRatio<T> r{side == 0 ? gaps[i].lo : gaps[i].hi, side == 0, gaps[i], b, b.length() / len[i]};
      if (first || r.ratio < report.thickness) {
        report.thickness = r.ratio;
        report.witness_gap = r.gap;
        report.witness_bridge = r.bridge;
        first = false;
      }
      report.ratios.push_back(std::move(r));
    }
  }
  return report;
}

template ThicknessReport<Rational> thickness(const CantorApproximation<Rational>&);
template ThicknessReport<double> thickness(const CantorApproximation<double>&);

// ---------------------------------------------------------------------------

Rational KmConstruction::quoted_gap() const {
  return Rational(22) / Rational(pow3(static_cast<unsigned>(m)) - 1);
}

Rational KmConstruction::quoted_thickness_bound() const {
  return Rational(BigInt(pow3(static_cast<unsigned>(m))) - 45) / 22;
}

namespace {

const AffineMap& branch_map(NBranch b) { return NMap::piece(b).map; }

struct NamedPoint {
  std::string name;
  Rational value;
};

std::vector<Interval<Rational>> intersect_sorted(const std::vector<Interval<Rational>>& a,
                                                 const std::vector<Interval<Rational>>& b) {
  std::vector<Interval<Rational>> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    Rational lo = std::max(a[i].lo, b[j].lo);
    Rational hi = std::min(a[i].hi, b[j].hi);
    if (lo <= hi) out.push_back({lo, hi});
    if (a[i].hi < b[j].hi) ++i; else ++j;
  }
  return out;
}

bool by_left(const Interval<Rational>& a, const Interval<Rational>& b) {
  return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
}

}  // namespace

ExactCantor refine_with_nmap(const ExactCantor& first_generation, const ExactCantor& current) {
  std::vector<Interval<Rational>> pre;
  pre.reserve(3 * current.size());
  for (const auto& piece : NMap::pieces()) {
    for (const auto& j : current.intervals) {
      Rational a = piece.map.preimage(j.lo), b = piece.map.preimage(j.hi);
      if (b < a) std::swap(a, b);
      a = std::max(a, piece.domain.lo);
      b = std::min(b, piece.domain.hi);
      if (a <= b) pre.push_back({a, b});
    }
  }
  std::sort(pre.begin(), pre.end(), by_left);
  ExactCantor next;
  next.ambient = first_generation.ambient;
  next.intervals = intersect_sorted(pre, first_generation.intervals);
  next.generation = current.generation + 1;
  next.source = first_generation.source;
  next.label = first_generation.label;
  next.validate();
  return next;
}

KmConstruction construct_km(int m, int generations) {
  if (m < 6 || m % 2 != 0) throw std::invalid_argument("m must be even and at least 6");
  if (generations < 1) throw std::invalid_argument("generation must be at least 1");

  KmConstruction km;
  km.m = m;
  std::vector<NBranch> itinerary{NBranch::middle, NBranch::right};
  for (int i = 0; i < m / 2 - 2; ++i) {
    itinerary.push_back(NBranch::left);
    itinerary.push_back(NBranch::right);
  }
  itinerary.push_back(NBranch::left);
  itinerary.push_back(NBranch::middle);
  km.q0 = maps1d::exact_periodic_point(itinerary);
  km.x_m = (Rational(1) - Rational(1) / Rational(pow3(static_cast<unsigned>(m - 2)))) / 2;

  km.orbit.push_back(km.q0);
  for (int k = 1; k < m; ++k) km.orbit.push_back(NMap::eval(km.orbit.back()));
  if (NMap::eval(km.orbit.back()) != km.q0) throw std::logic_error("q_0 is not periodic of period m");
  const auto& q = km.orbit;

  auto& qt = km.backward;
  qt[0] = branch_map(NBranch::right).preimage(q[1]);
  qt[m - 1] = branch_map(NBranch::middle).preimage(qt[0]);
  for (int j = 0; j <= m - 5; ++j) {
    NBranch b = j % 2 == 0 ? NBranch::left : NBranch::right;
    qt[m - j - 2] = branch_map(b).preimage(qt[m - j - 1]);
  }

  // Ordering of the construction points on the line.
  std::vector<NamedPoint> chain;
  chain.push_back({"-3/2", NMap::lower()});
  chain.push_back({"q_2", q[2]});
  for (int k = 4; k <= m - 2; k += 2) {
    chain.push_back({"q~_" + std::to_string(k), qt[k]});
    chain.push_back({"q_" + std::to_string(k), q[k]});
  }
  chain.push_back({"0", Rational(0)});
  chain.push_back({"q_" + std::to_string(m - 1), q[m - 1]});
  chain.push_back({"q~_" + std::to_string(m - 1), qt[m - 1]});
  chain.push_back({"q_0", q[0]});
  chain.push_back({"1/2", Rational(1, 2)});
  chain.push_back({"q~_0", qt[0]});
  for (int k = m - 3; k >= 3; k -= 2) {
    chain.push_back({"q_" + std::to_string(k), q[k]});
    chain.push_back({"q~_" + std::to_string(k), qt[k]});
  }
  chain.push_back({"q_1", q[1]});
  chain.push_back({"3/2", NMap::upper()});
  for (std::size_t i = 1; i < chain.size(); ++i) {
    if (!(chain[i - 1].value < chain[i].value))
      throw std::logic_error("ordering violated: expected " + chain[i - 1].name + " < " + chain[i].name);
  }
  for (const auto& p : chain) km.ordering_chain.push_back(p.name);

  auto& I = km.first_generation_by_label;
  I.resize(static_cast<std::size_t>(m));
  I[0] = {qt[0], q[m - 3]};
  for (int i = 1; i <= m / 2 - 2; ++i) {
    I[2 * i - 1] = {qt[2 * i + 1], q[2 * i - 1]};
    I[2 * i] = {q[2 * i], qt[2 * i + 2]};
  }
  I[m - 3] = {q[m - 2], branch_map(NBranch::left).preimage(q[2])};
  I[m - 2] = {branch_map(NBranch::middle).preimage(q[2]), q[m - 1]};
  I[m - 1] = {qt[m - 1], q[0]};
  for (int i = 0; i < m; ++i) {
    if (!(I[i].lo < I[i].hi))
      throw std::logic_error("ordering violated: I_" + std::to_string(i) + " has left end >= right end");
  }

  ExactCantor g1;
  g1.ambient = {q[2], q[1]};
  g1.intervals = I;
  std::sort(g1.intervals.begin(), g1.intervals.end(), by_left);
  g1.generation = 1;
  g1.source = Source::km_construction;
  g1.label = "K_" + std::to_string(m);
  for (std::size_t i = 1; i < g1.size(); ++i) {
    if (!(g1.intervals[i - 1].hi < g1.intervals[i].lo))
      throw std::logic_error("ordering violated: first-generation intervals overlap");
  }
  g1.validate();
  km.generations.push_back(g1);
  for (int g = 2; g <= generations; ++g) km.generations.push_back(refine_with_nmap(g1, km.generations.back()));
  return km;
}

ExactCantor build_Km(int m, int generation) { return construct_km(m, generation).generations.back(); }

// ---------------------------------------------------------------------------

bool families_overlap(const ExactCantor& a, const ExactCantor& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a.intervals[i].overlaps(b.intervals[j])) return true;
    if (a.intervals[i].hi < b.intervals[j].hi) ++i; else ++j;
  }
  return false;
}

bool contained_in_gap(const ExactCantor& inner, const ExactCantor& outer, bool* unbounded) {
  const Interval<Rational> h = inner.hull();
  if (unbounded) *unbounded = false;
  if (h.hi < outer.intervals.front().lo || h.lo > outer.intervals.back().hi) {
    if (unbounded) *unbounded = true;
    return true;
  }
  for (std::size_t i = 1; i < outer.size(); ++i) {
    if (outer.intervals[i - 1].hi < h.lo && h.hi < outer.intervals[i].lo) return true;
  }
  return false;
}

namespace {

std::optional<Rational> thickness_product(const ExactCantor& a, const ExactCantor& b) {
  if (a.size() < 2 || b.size() < 2) return std::nullopt;
  return thickness(a).thickness * thickness(b).thickness;
}

}  // namespace

GapLemmaReport gap_lemma_check(const std::vector<ExactCantor>& a, const std::vector<ExactCantor>& b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("gap_lemma_check: generation lists must be nonempty and of equal length");
  GapLemmaReport r;
  r.thickness_product = thickness_product(a.back(), b.back());
  for (std::size_t g = 0; g < a.size(); ++g) {
    r.generations_checked = static_cast<int>(g + 1);
    bool unbounded = false;
    if (contained_in_gap(a[g], b[g], &unbounded)) {
      r.verdict = GapLemmaVerdict::first_in_gap_of_second;
      r.outside_hull = unbounded;
      r.detail = "first family lies in a complementary component of the second at generation " + std::to_string(g + 1);
      return r;
    }
    if (contained_in_gap(b[g], a[g], &unbounded)) {
      r.verdict = GapLemmaVerdict::second_in_gap_of_first;
      r.outside_hull = unbounded;
      r.detail = "second family lies in a complementary component of the first at generation " + std::to_string(g + 1);
      return r;
    }
    if (!families_overlap(a[g], b[g])) {
      r.verdict = GapLemmaVerdict::inconclusive;
      r.first_disjoint_generation = static_cast<int>(g + 1);
      r.violates_gap_lemma = r.thickness_product && *r.thickness_product > 1;
      r.detail = "linked families without overlap at generation " + std::to_string(g + 1);
      return r;
    }
  }
  r.verdict = GapLemmaVerdict::intervals_intersect;
  r.detail = "families overlap at every generation through " + std::to_string(a.size());
  return r;
}

GapLemmaReport gap_lemma_check(const ExactCantor& a, const ExactCantor& b) {
  return gap_lemma_check(std::vector<ExactCantor>{a}, std::vector<ExactCantor>{b});
}

// ---------------------------------------------------------------------------

MarkovCantorResult markov_cantor(const MarkovBranchSystem& system, int generation) {
  MarkovCantorResult result;
  if (generation < 0) {
    result.diagnostics.push_back({0, "generation must be nonnegative"});
    return result;
  }
  const auto& br = system.branches;
  if (br.empty()) {
    result.diagnostics.push_back({0, "branch system is empty"});
    return result;
  }
  std::vector<std::size_t> order(br.size());
  for (std::size_t i = 0; i < br.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return by_left(br[x].domain, br[y].domain); });

  for (std::size_t i = 0; i < br.size(); ++i) {
    const auto& b = br[i];
    auto report = [&](const std::string& s) { result.diagnostics.push_back({i, s}); };
    if (!(b.domain.lo < b.domain.hi)) report("domain is empty or degenerate");
    if (!system.ambient.contains(b.domain)) report("domain leaves the ambient interval");
    if (abs(b.map.slope) <= 1) report("branch is not expanding, preimages do not contract (|slope| = " +
                                      cubiclab::to_string(Rational(abs(b.map.slope))) + ")");
  }
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (!(br[order[k - 1]].domain.hi < br[order[k]].domain.lo))
      result.diagnostics.push_back({order[k], "domain overlaps the domain of branch " + std::to_string(order[k - 1])});
  }
  if (!result.diagnostics.empty()) return result;

  ExactCantor current;
  current.ambient = system.ambient;
  current.source = Source::markov_system;
  current.generation = 0;
  current.intervals = {system.ambient};
  std::vector<Interval<Rational>> domains;
  for (auto idx : order) domains.push_back(br[idx].domain);

  for (int g = 1; g <= generation; ++g) {
    std::vector<Interval<Rational>> next;
    for (auto idx : order) {
      const auto& b = br[idx];
      std::vector<Interval<Rational>> local;
      for (const auto& j : current.intervals) {
        Rational x = b.map.preimage(j.lo), y = b.map.preimage(j.hi);
        if (y < x) std::swap(x, y);
        x = std::max(x, b.domain.lo);
        y = std::min(y, b.domain.hi);
        if (x <= y) local.push_back({x, y});
      }
      std::sort(local.begin(), local.end(), by_left);
      next.insert(next.end(), local.begin(), local.end());
    }
    current.intervals = intersect_sorted(next, domains);
    current.generation = g;
    if (current.intervals.empty()) {
      result.diagnostics.push_back({0, "generation " + std::to_string(g) + " is empty"});
      return result;
    }
    try {
      current.validate();
    } catch (const std::logic_error& e) {
      result.diagnostics.push_back({0, std::string("generation ") + std::to_string(g) + ": " + e.what()});
      return result;
    }
  }
  result.set = std::move(current);
  return result;
}

MarkovBranchSystem km_branch_system(const KmConstruction& km) {
  MarkovBranchSystem sys;
  sys.ambient = km.generations.front().ambient;
  for (const auto& iv : km.generations.front().intervals) {
    Rational mid = (iv.lo + iv.hi) / 2;
    sys.branches.push_back({iv, NMap::piece(NMap::branch_of(mid)).map});
  }
  return sys;
}

// ---------------------------------------------------------------------------

MonotoneMap conjugacy_map() {
  return {"h(x) = 2 sin(pi x / 3)", maps1d::conjugacy_h, maps1d::conjugacy_h_derivative};
}

FloatCantor image_cantor(const FloatCantor& k, const MonotoneMap& map, int samples) {
  if (samples < 2) throw std::invalid_argument("image_cantor: need at least two samples");
  const double lo = k.ambient.lo, hi = k.ambient.hi;
  int sign = 0;
  double prev = map.f(lo);
  for (int i = 1; i <= samples; ++i) {
    double x = i == samples ? hi : lo + (hi - lo) * i / samples;
    double y = map.f(x);
    int s = y > prev ? 1 : (y < prev ? -1 : 0);
    if (s == 0 || (sign != 0 && s != sign) || !std::isfinite(y)) {
      std::ostringstream os;
      os << "image_cantor: " << map.name << " is not strictly monotone near x = " << x;
      throw std::invalid_argument(os.str());
    }
    sign = s;
    prev = y;
  }
  auto image = [&](const Interval<double>& iv) {
    double a = map.f(iv.lo), b = map.f(iv.hi);
    return sign > 0 ? Interval<double>{a, b} : Interval<double>{b, a};
  };
  FloatCantor out;
  out.ambient = image(k.ambient);
  for (const auto& iv : k.intervals) out.intervals.push_back(image(iv));
  if (sign < 0) std::reverse(out.intervals.begin(), out.intervals.end());
  out.generation = k.generation;
  out.source = Source::image;
  out.label = map.name + "(" + k.label + ")";
  return out;
}

ImageThicknessCheck image_thickness_check(const FloatCantor& k, const MonotoneMap& map, std::optional<double> delta) {
  ImageThicknessCheck c;
  c.delta = delta.value_or(k.ambient.length() / 100.0);
  const double lo = k.ambient.lo + c.delta, hi = k.ambient.hi - c.delta;
  if (!(lo < hi)) throw std::invalid_argument("image_thickness_check: delta exceeds half the ambient length");
  constexpr int n = 4000;
  double dmin = std::abs(map.df(lo)), dmax = dmin;
  for (int i = 1; i <= n; ++i) {
    double d = std::abs(map.df(lo + (hi - lo) * i / n));
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  if (!(dmin > 0)) throw std::domain_error("image_thickness_check: derivative vanishes on the trimmed ambient");
  c.distortion = dmax / dmin;
  c.source_thickness = thickness(k).thickness;
  c.image_thickness = thickness(image_cantor(k, map)).thickness;
  c.bound = c.source_thickness / std::max(c.distortion, 4.0);
  c.holds = c.image_thickness >= c.bound;
  return c;
}

}  // namespace cubiclab::cantor
