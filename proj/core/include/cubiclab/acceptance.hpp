#pragma once

#include <nlohmann/json.hpp>

#include <functional>
#include <set>
#include <string>
#include <vector>

namespace cubiclab::acceptance {

struct Options {
  /// Criterion keys or aliases to skip.
  std::set<std::string> skip;
  /// Replacements for named reference constants, e.g. {"velocity.dy_dmu": 0.3}.
  /// Unknown names throw std::invalid_argument.
  nlohmann::json constants = nlohmann::json::object();
  unsigned threads = 1;
};

struct CriterionResult {
  int id = 0;
  std::string key;
  std::string title;
  bool passed = false;
  bool skipped = false;
  double seconds = 0;
  double budget_seconds = 0;
  bool within_budget = true;
  std::vector<std::string> details;  // one line per sub-check
  std::string failure;               // first failing sub-check
  nlohmann::json data = nlohmann::json::object();
};

struct Criterion {
  int id;
  std::string key;
  std::vector<std::string> aliases;
  std::string title;
  double budget_seconds;
  std::function<void(const Options&, CriterionResult&)> run;
};

const std::vector<Criterion>& criteria();

/// Reference constants with their defaults.
const nlohmann::json& default_constants();

/// Resolves a key or alias to the criterion key; empty when unknown.
std::string canonical_key(const std::string& name);

struct SuiteReport {
  std::vector<CriterionResult> results;

  /// True when every criterion that ran passed.
  bool passed() const;
  std::vector<std::string> failing() const;
  /// Deterministic: no timings, only budget compliance.
  nlohmann::json to_json() const;
  /// One line per criterion.
  std::string table() const;
};

/// Unknown skip names throw std::invalid_argument.
SuiteReport run_suite(const Options& options = {});
CriterionResult run_criterion(const Criterion& c, const Options& options);

}  // namespace cubiclab::acceptance
