#include "cubiclab/cantor.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cubiclab::cantor {

void write_intervals_csv(std::ostream& os, const std::vector<ExactCantor>& generations) {
  os << "generation,left_num,left_den,right_num,right_den\n";
  for (const auto& k : generations) {
    for (const auto& iv : k.intervals) {
      os << k.generation << ',' << numerator_string(iv.lo) << ',' << denominator_string(iv.lo) << ','
         << numerator_string(iv.hi) << ',' << denominator_string(iv.hi) << '\n';
    }
  }
}

std::vector<ExactCantor> read_intervals_csv(std::istream& is) {
  std::string line;
  while (std::getline(is, line) && !line.empty() && line[0] == '#') {
  }
  if (line != "generation,left_num,left_den,right_num,right_den")
    throw std::runtime_error("interval CSV: missing or unexpected header");
  std::vector<ExactCantor> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw std::runtime_error("interval CSV line " + std::to_string(lineno) + ": expected 5 columns");
    int g = std::stoi(cells[0]);
    Rational lo = Rational(BigInt(cells[1]), BigInt(cells[2]));
    Rational hi = Rational(BigInt(cells[3]), BigInt(cells[4]));
    if (out.empty() || out.back().generation != g) {
      out.emplace_back();
      out.back().generation = g;
    }
    out.back().intervals.push_back({lo, hi});
  }
  for (auto& k : out) {
    k.ambient = k.hull();
    k.validate();
  }
  return out;
}

namespace {

nlohmann::json interval_json(const Interval<Rational>& iv) {
  return {{"left", cubiclab::to_string(iv.lo)}, {"right", cubiclab::to_string(iv.hi)}, {"left_float", to_double(iv.lo)},
          {"right_float", to_double(iv.hi)}};
}

nlohmann::json interval_json(const Interval<double>& iv) { return {{"left", iv.lo}, {"right", iv.hi}}; }

nlohmann::json scalar_json(const Rational& q) { return {{"exact", cubiclab::to_string(q)}, {"float", to_double(q)}}; }
nlohmann::json scalar_json(double x) { return x; }

template <class T>
nlohmann::json cantor_json(const CantorApproximation<T>& k) {
  nlohmann::json iv = nlohmann::json::array();
  for (const auto& i : k.intervals) iv.push_back(interval_json(i));
  return {{"label", k.label}, {"source", to_string(k.source)}, {"generation", k.generation},
          {"ambient", interval_json(k.ambient)}, {"count", k.size()}, {"intervals", iv}};
}

template <class T>
nlohmann::json report_json(const ThicknessReport<T>& r) {
  nlohmann::json ratios = nlohmann::json::array();
  for (const auto& e : r.ratios) {
    ratios.push_back({{"point", scalar_json(e.point)}, {"bridge_side", e.bridge_on_left ? "left" : "right"},
                      {"gap", interval_json(e.gap)}, {"bridge", interval_json(e.bridge)},
                      {"ratio", scalar_json(e.ratio)}});
  }
  return {{"thickness", scalar_json(r.thickness)}, {"witness_gap", interval_json(r.witness_gap)},
          {"witness_bridge", interval_json(r.witness_bridge)}, {"ratios", ratios}};
}

}  // namespace

nlohmann::json to_json(const ExactCantor& k) { return cantor_json(k); }
nlohmann::json to_json(const FloatCantor& k) { return cantor_json(k); }
nlohmann::json to_json(const ThicknessReport<Rational>& r) { return report_json(r); }
nlohmann::json to_json(const ThicknessReport<double>& r) { return report_json(r); }

nlohmann::json to_json(const GapLemmaReport& r) {
  nlohmann::json j{{"verdict", to_string(r.verdict)},
                   {"generations_checked", r.generations_checked},
                   {"first_disjoint_generation", r.first_disjoint_generation},
                   {"outside_hull", r.outside_hull},
                   {"violates_gap_lemma", r.violates_gap_lemma},
                   {"detail", r.detail}};
  j["thickness_product"] = r.thickness_product ? scalar_json(*r.thickness_product) : nlohmann::json(nullptr);
  return j;
}

}  // namespace cubiclab::cantor
