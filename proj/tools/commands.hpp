#pragma once

#include "cubiclab/report.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace cubiclab::cli {

enum ExitCode : int { ok = 0, check_failed = 1, usage_error = 2, runtime_error = 3 };

report::ExperimentSchema cantor_schema();
report::ExperimentSchema renorm_schema();
report::ExperimentSchema attractor_schema();
report::ExperimentSchema tangency_schema();
report::ExperimentSchema verify_schema();

struct RunContext {
  unsigned threads = 1;
  std::ostream& out;
  std::ostream& err;
};

int cmd_cantor(const report::ExperimentConfig& cfg, const RunContext& ctx);
int cmd_renorm(const report::ExperimentConfig& cfg, const RunContext& ctx);
int cmd_attractor(const report::ExperimentConfig& cfg, const RunContext& ctx);
int cmd_tangency(const report::ExperimentConfig& cfg, const RunContext& ctx);
int cmd_verify(const report::ExperimentConfig& cfg, const RunContext& ctx);

/// Full command line: parsing, config resolution, dispatch.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cubiclab::cli
