#include "commands.hpp"

#include "cubiclab/acceptance.hpp"
#include "cubiclab/cantor.hpp"
#include "cubiclab/manifold.hpp"
#include "cubiclab/parallel.hpp"
#include "cubiclab/planar.hpp"
#include "cubiclab/renorm.hpp"
#include "cubiclab/tangency.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <functional>
#include <iomanip>
#include <memory>
#include <ostream>

namespace cubiclab::cli {

using nlohmann::json;

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

json model_defaults() { return {{"lambda", 0.2}, {"sigma", 2.0}, {"a", 1.0}, {"b", 1.0}, {"c", 1.0}}; }

renorm::ModelParams model_from(const report::ExperimentConfig& cfg) {
  renorm::ModelParams p;
  p.lambda = cfg.number("lambda");
  p.sigma = cfg.number("sigma");
  p.a = cfg.number("a");
  p.b = cfg.number("b");
  p.c = cfg.number("c");
  return p;
}

std::ofstream& precise(std::ofstream& os) {
  os << std::setprecision(17);
  return os;
}

}  // namespace

report::ExperimentSchema cantor_schema() {
  return {"cantor", {{"m", 6}, {"generation", 3}}, json::object(), json::object()};
}

report::ExperimentSchema renorm_schema() {
  auto params = model_defaults();
  params["perturbation"] = "quartic";
  params["epsilon"] = 0.1;
  params["n_min"] = 4;
  params["n_max"] = 14;
  return {"renorm", params, {{"rate", 0.05}, {"fd_step", 1e-4}}, {{"box", 41}, {"parameters", 5}}};
}

report::ExperimentSchema attractor_schema() {
  return {"attractor",
          {{"a", 2.8},
           {"b", 0.1},
           {"steps", 1000000},
           {"discard", 1000},
           {"x0", 0.1},
           {"y0", 0.9},
           {"sample", 100000},
           {"manifold_length", 6.0}},
          {{"bailout", 1000.0}},
          {{"fixed_point_grid", 50}}};
}

report::ExperimentSchema tangency_schema() {
  auto params = model_defaults();
  params["mu_bar"] = 3.0;
  params["nu_bar"] = 0.0;
  params["n"] = 6;
  params["t_min"] = -0.1;
  params["t_max"] = 0.1;
  params["samples"] = 9;
  return {"tangency", params, {{"dt", 1e-3}, {"noise_floor", 1e-4}, {"max_coupling", 0.05}}, {{"fibers", 401}}};
}

report::ExperimentSchema verify_schema() {
  return {"verify", {{"skip", json::array()}, {"constants", json::object()}}, json::object(), json::object()};
}

// ---------------------------------------------------------------------------

int cmd_cantor(const report::ExperimentConfig& cfg, const RunContext& ctx) {
  const long m = cfg.integer("m");
  const long gen = cfg.integer("generation");
  if (m < 6 || m % 2 != 0) throw UsageError("m must be even and >= 6");
  if (gen < 1 || gen > 8) throw UsageError("generation must be in 1..8");

  const auto km = cantor::construct_km(static_cast<int>(m), static_cast<int>(gen));
  const auto& last = km.generations.back();
  const auto tr = cantor::thickness(last);
  const Rational bound = km.quoted_thickness_bound();
  const bool holds = tr.thickness >= bound;

  report::ArtifactWriter w(cfg.output_dir, cfg);
  {
    auto os = w.open_csv("intervals.csv");
    cantor::write_intervals_csv(os, km.generations);
  }
  json by_gen = json::array();
  for (const auto& g : km.generations) by_gen.push_back(cubiclab::to_string(cantor::thickness(g).thickness));
  json orbit = json::array();
  for (const auto& q : km.orbit) orbit.push_back(cubiclab::to_string(q));
  w.write_json("thickness.json", {{"m", m},
                                  {"generation", gen},
                                  {"q0", cubiclab::to_string(km.q0)},
                                  {"x_m", cubiclab::to_string(km.x_m)},
                                  {"orbit", orbit},
                                  {"intervals", last.size()},
                                  {"report", cantor::to_json(tr)},
                                  {"thickness_by_generation", by_gen},
                                  {"bound", cubiclab::to_string(bound)},
                                  {"bound_holds", holds},
                                  {"realized_gap", cubiclab::to_string(km.realized_gap())},
                                  {"quoted_gap", cubiclab::to_string(km.quoted_gap())}});
  w.write_manifest({{"bound_holds", holds}});

  ctx.out << "K_" << m << " generation " << gen << ": " << last.size() << " intervals, thickness "
          << cubiclab::to_string(tr.thickness) << " (" << to_double(tr.thickness) << "), bound "
          << cubiclab::to_string(bound) << " (" << to_double(bound) << ") " << (holds ? "holds" : "FAILS") << '\n';
  return holds ? ok : check_failed;
}

int cmd_renorm(const report::ExperimentConfig& cfg, const RunContext& ctx) {
  auto p = model_from(cfg);
  const auto kind = cfg.text("perturbation");
  if (kind == "quartic") {
    p.perturbation.kind = renorm::Perturbation::Kind::quartic;
    p.perturbation.epsilon = cfg.number("epsilon");
  } else if (kind != "none") {
    throw UsageError("perturbation must be none or quartic");
  }
  p.validate();
  const long n_min = cfg.integer("n_min"), n_max = cfg.integer("n_max");
  if (n_min < 1) throw UsageError("n must be >= 1");
  if (n_max <= n_min) throw UsageError("n range needs at least two values");

  renorm::ResidualOptions opts;
  opts.grid = static_cast<int>(cfg.integer("box"));
  opts.parameter_grid = static_cast<int>(cfg.integer("parameters"));
  opts.fd_step = cfg.number("fd_step");
  opts.threads = ctx.threads;
  const auto fit = renorm::fit_decay(p, static_cast<int>(n_min), static_cast<int>(n_max), opts);
  const bool certified = fit.within(cfg.number("rate"));

  report::ArtifactWriter w(cfg.output_dir, cfg);
  {
    auto os = w.open_csv("residual.csv");
    renorm::write_residual_csv(os, fit);
  }
  w.write_json("decay.json", {{"model", renorm::to_json(p)}, {"fit", renorm::to_json(fit)}, {"certified", certified}});
  w.write_manifest({{"certified", certified}});
  ctx.out << "residual decay slope " << fit.slope << ", expected " << fit.predicted << " +- " << cfg.number("rate")
          << ": " << (certified ? "certified" : "NOT certified") << '\n';
  return certified ? ok : check_failed;
}

int cmd_attractor(const report::ExperimentConfig& cfg, const RunContext& ctx) {
  const double a = cfg.number("a"), b = cfg.number("b");
  if (b == 0) throw UsageError("b must be nonzero (the inverse map is undefined at b = 0)");
  const long steps = cfg.integer("steps"), discard = cfg.integer("discard"), sample = cfg.integer("sample");
  if (steps < 10000) throw UsageError("steps must be >= 10000");
  if (discard < 0 || sample < 0) throw UsageError("discard and sample must be nonnegative");
  const auto map = planar::cubic_henon_family()({a, b});
  const double bailout = cfg.number("bailout");
  report::ArtifactWriter w(cfg.output_dir, cfg);
  json diag;

  const auto fps = planar::find_periodic_points(map, 1, {-3, 3, -3, 3}, static_cast<int>(cfg.integer("fixed_point_grid")),
                                                1e-12, ctx.threads);
  {
    auto os = w.open_csv("fixed_points.csv");
    precise(os) << "x,y,type,lambda_1,lambda_2\n";
    for (const auto& s : fps)
      os << s.location.x << ',' << s.location.y << ',' << planar::to_string(s.spectrum) << ',' << s.eigenvalues[0] << ','
         << s.eigenvalues[1] << '\n';
  }
  diag["fixed_points"] = fps.size();

  const Vec2 start{cfg.number("x0"), cfg.number("y0")};
  const auto orbit = planar::iterate(map, start, steps, bailout, true);
  {
    auto os = w.open_csv("attractor.csv");
    precise(os) << "x,y\n";
    const long have = static_cast<long>(orbit.points.size());
    const long first = std::max(std::min(discard, have), have - sample);
    for (long i = first; i < have; ++i) os << orbit.points[i].x << ',' << orbit.points[i].y << '\n';
  }
  const bool bounded = !orbit.escaped && !orbit.non_finite;
  diag["bounded"] = bounded;
  diag["steps_completed"] = orbit.steps_completed;
  if (!bounded) {
    diag["escape"] = {{"step", orbit.steps_completed}, {"x", orbit.last.x}, {"y", orbit.last.y}};
    w.write_manifest(diag);
    ctx.err << "orbit left the bailout radius after " << orbit.steps_completed << " steps\n";
    return check_failed;
  }

  const auto ly = planar::lyapunov(map, start, steps, discard, bailout);
  w.write_json("lyapunov.json", planar::to_json(ly));
  diag["lyapunov"] = ly.exponent;

  for (const auto& s : fps) {
    if (std::hypot(s.location.x, s.location.y) > 1e-8 || !s.is_saddle()) continue;
    const Box2 trap{-3, 3, -3, 3};
    std::vector<Vec2> both;
    for (int side : {1, -1}) {
      const auto c = manifold::grow_manifold(map, s, manifold::Kind::unstable, cfg.number("manifold_length"), side, {},
                                             [&](const Vec2& q) { return !trap.contains(q); });
      if (side == -1) both.insert(both.begin(), c.points.rbegin(), c.points.rend());
      else both.insert(both.end(), c.points.begin() + 1, c.points.end());
    }
    auto os = w.open_csv("unstable_manifold_origin.csv");
    precise(os);
    manifold::write_polyline_csv(os, both);
  }
  w.write_manifest(diag);
  ctx.out << fps.size() << " fixed points; top Lyapunov exponent " << ly.exponent << " over " << steps << " steps\n";
  for (const auto& s : fps)
    ctx.out << "  (" << s.location.x << ", " << s.location.y << ") " << planar::to_string(s.spectrum) << " "
            << s.eigenvalues[0] << ", " << s.eigenvalues[1] << '\n';
  return ok;
}

int cmd_tangency(const report::ExperimentConfig& cfg, const RunContext& ctx) {
  tangency::ExperimentConfig ec;
  ec.model = model_from(cfg);
  ec.model.validate();
  ec.n = static_cast<int>(cfg.integer("n"));
  if (ec.n < 1) throw UsageError("n must be >= 1");
  ec.fibers = static_cast<int>(cfg.integer("fibers"));
  ec.dt = cfg.number("dt");
  ec.noise_floor = cfg.number("noise_floor");
  const double mu = cfg.number("mu_bar"), nu = cfg.number("nu_bar");
  const double t_lo = cfg.number("t_min"), t_hi = cfg.number("t_max");
  const long samples = cfg.integer("samples");
  report::ArtifactWriter w(cfg.output_dir, cfg);
  json diag;

  const double coupling = ec.model.coupling(ec.n);
  diag["coupling"] = coupling;
  if (coupling > cfg.number("max_coupling")) {
    ctx.err << "warning: coupling (lambda sigma)^n = " << coupling << " exceeds " << cfg.number("max_coupling")
            << "; tolerances based on the limit map are widened by the measured residual\n";
    diag["warning"] = "coupling above limit threshold";
  }

  if (!(t_hi > t_lo) || samples < 2) {
    auto os = w.open_csv("events.csv");
    tangency::write_events_csv(os, tangency::ScanResult{});
    diag["empty_range"] = true;
    w.write_manifest(diag);
    ctx.out << "empty parameter range; no events\n";
    return ok;
  }

  tangency::TangencyExperiment ex(ec);
  const auto sr = tangency::scan(ex, mu, nu, t_lo, t_hi, static_cast<int>(samples), ctx.threads);
  {
    auto os = w.open_csv("events.csv");
    precise(os);
    tangency::write_events_csv(os, sr);
  }
  {
    auto os = w.open_csv("scan.csv");
    precise(os) << "t,upper_depth,lower_depth\n";
    for (const auto& r : sr.rows) {
      os << r.t << ',';
      if (r.upper_depth) os << *r.upper_depth;
      os << ',';
      if (r.lower_depth) os << *r.lower_depth;
      os << '\n';
    }
  }
  const std::vector<std::pair<std::string, manifold::ManifoldCurve>> curves{
      {"unstable_plus.csv", ex.unstable_plus(mu, nu)},
      {"stable_plus.csv", ex.stable_plus(mu, nu)},
      {"stable_minus.csv", ex.stable_minus(mu, nu)}};
  for (const auto& [name, c] : curves) {
    auto os = w.open_csv(name);
    precise(os);
    manifold::write_polyline_csv(os, c.points);
  }

  bool consistent = true;
  json events = json::array();
  for (std::size_t i = 0; i < sr.events.size(); ++i) {
    const auto& e = sr.events[i];
    auto j = tangency::to_json(e);
    j["region"] = sr.region[i];
    events.push_back(j);
    const auto want = sr.region[i] == "upper" ? tangency::Classification::contact_making
                                              : tangency::Classification::contact_breaking;
    if (e.classification != want) consistent = false;
    ctx.out << sr.region[i] << " event at t=" << e.parameter << " (" << e.location.x << ", " << e.location.y
            << "): " << tangency::to_string(e.classification) << ", gap slope " << e.gap_slope << '\n';
  }
  w.write_json("summary.json", {{"mu_bar", mu},
                                {"nu_bar", nu},
                                {"n", ec.n},
                                {"coupling", coupling},
                                {"measured_residual", ex.measured_residual()},
                                {"events", events},
                                {"consistent", consistent}});
  diag["events"] = sr.events.size();
  diag["consistent"] = consistent;
  w.write_manifest(diag);
  if (sr.events.empty()) ctx.out << "no tangency events in range\n";
  return consistent ? ok : check_failed;
}

int cmd_verify(const report::ExperimentConfig& cfg, const RunContext& ctx) {
  acceptance::Options o;
  for (const auto& s : cfg.parameters.at("skip")) o.skip.insert(s.get<std::string>());
  o.constants = cfg.parameters.at("constants");
  o.threads = ctx.threads;
  for (const auto& s : o.skip)
    if (acceptance::canonical_key(s).empty()) throw UsageError("unknown criterion '" + s + "'");
  for (const auto& [k, v] : o.constants.items())
    if (!acceptance::default_constants().contains(k)) throw UsageError("unknown constant '" + k + "'");

  const auto rep = acceptance::run_suite(o);
  report::ArtifactWriter w(cfg.output_dir, cfg);
  w.write_json("verify.json", rep.to_json());
  w.write_manifest({{"passed", rep.passed()}, {"failing", rep.failing()}});
  ctx.out << rep.table();
  if (rep.passed()) return ok;
  ctx.err << "failing criteria:";
  for (const auto& k : rep.failing()) ctx.err << ' ' << k;
  ctx.err << '\n';
  return check_failed;
}

// ---------------------------------------------------------------------------

namespace {

struct Binding {
  CLI::Option* option;
  std::string section;
  std::string key;
  std::function<json()> value;
};

template <class T>
void add_bound(CLI::App* sc, std::vector<Binding>& out, const std::string& flags, const std::string& section,
          const std::string& key, const std::string& help) {
  auto store = std::make_shared<T>();
  auto* opt = sc->add_option(flags, *store, help);
  out.push_back({opt, section, key, [store] { return json(*store); }});
}

void bind_model(CLI::App* sc, std::vector<Binding>& b) {
  add_bound<double>(sc, b, "--lambda", "parameters", "lambda", "contracting eigenvalue");
  add_bound<double>(sc, b, "--sigma", "parameters", "sigma", "expanding eigenvalue");
  add_bound<double>(sc, b, "--a", "parameters", "a", "coefficient a");
  add_bound<double>(sc, b, "--b", "parameters", "b", "coefficient b");
  add_bound<double>(sc, b, "--c", "parameters", "c", "coefficient c");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical laboratory for cubic homoclinic tangencies", "cubiclab"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = default_threads();
  std::string config_path, out_dir;
  app.add_option("--threads", threads, "worker threads (default: logical CPUs)")->check(CLI::PositiveNumber);
  app.add_option("--config", config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (default: $CUBICLAB_OUT or ./out)");

  std::map<std::string, std::vector<Binding>> bindings;
  std::map<std::string, report::ExperimentSchema> schemas{{"cantor", cantor_schema()},
                                                          {"renorm", renorm_schema()},
                                                          {"attractor", attractor_schema()},
                                                          {"tangency", tangency_schema()},
                                                          {"verify", verify_schema()}};

  auto* cantor = app.add_subcommand("cantor", "K_m construction, thickness and bound check");
  add_bound<long>(cantor, bindings["cantor"], "--m", "parameters", "m", "even m >= 6");
  add_bound<long>(cantor, bindings["cantor"], "--gen,--generation", "parameters", "generation", "refinement generation");

  auto* renorm = app.add_subcommand("renorm", "residual of the renormalized maps and its decay rate");
  bind_model(renorm, bindings["renorm"]);
  add_bound<std::string>(renorm, bindings["renorm"], "--perturbation", "parameters", "perturbation", "none or quartic");
  add_bound<double>(renorm, bindings["renorm"], "--epsilon", "parameters", "epsilon", "quartic coefficient");
  add_bound<long>(renorm, bindings["renorm"], "--n-min", "parameters", "n_min", "first n");
  add_bound<long>(renorm, bindings["renorm"], "--n-max", "parameters", "n_max", "last n");
  add_bound<double>(renorm, bindings["renorm"], "--rate-tol", "tolerances", "rate", "slope tolerance");
  add_bound<long>(renorm, bindings["renorm"], "--grid", "grids", "box", "points per side on [-2,2]^2");

  auto* attractor = app.add_subcommand("attractor", "cubic Henon attractor, fixed points, Lyapunov exponent");
  add_bound<double>(attractor, bindings["attractor"], "--a", "parameters", "a", "parameter a");
  add_bound<double>(attractor, bindings["attractor"], "--b", "parameters", "b", "parameter b (nonzero)");
  add_bound<long>(attractor, bindings["attractor"], "--steps", "parameters", "steps", "iterations");
  add_bound<long>(attractor, bindings["attractor"], "--discard", "parameters", "discard", "transient");
  add_bound<double>(attractor, bindings["attractor"], "--x0", "parameters", "x0", "initial x");
  add_bound<double>(attractor, bindings["attractor"], "--y0", "parameters", "y0", "initial y");
  add_bound<long>(attractor, bindings["attractor"], "--sample", "parameters", "sample", "orbit points written");

  auto* tangency = app.add_subcommand("tangency", "scan of the nu_bar direction for tangencies");
  bind_model(tangency, bindings["tangency"]);
  add_bound<double>(tangency, bindings["tangency"], "--mu-bar", "parameters", "mu_bar", "base mu_bar");
  add_bound<double>(tangency, bindings["tangency"], "--nu-bar", "parameters", "nu_bar", "base nu_bar");
  add_bound<long>(tangency, bindings["tangency"], "--n", "parameters", "n", "renormalization depth");
  add_bound<double>(tangency, bindings["tangency"], "--t-min", "parameters", "t_min", "scan start");
  add_bound<double>(tangency, bindings["tangency"], "--t-max", "parameters", "t_max", "scan end");
  add_bound<long>(tangency, bindings["tangency"], "--samples", "parameters", "samples", "scan points");

  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  auto skip = std::make_shared<std::vector<std::string>>();
  auto constants = std::make_shared<std::vector<std::string>>();
  auto* skip_opt = verify->add_option("--skip", *skip, "criteria to skip (key or alias)")->delimiter(',');
  auto* const_opt = verify->add_option("--constant", *constants, "override a reference constant, key=value");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage_error;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  json overrides = json::object();
  for (const auto& b : bindings[name])
    if (b.option->count() > 0) overrides[b.section][b.key] = b.value();
  if (out_dir.size()) overrides["output_dir"] = out_dir;
  if (name == "verify") {
    if (skip_opt->count() > 0) overrides["parameters"]["skip"] = *skip;
    if (const_opt->count() > 0) {
      json c = json::object();
      for (const auto& kv : *constants) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
          err << "--constant expects key=value\n";
          return usage_error;
        }
        const auto key = kv.substr(0, eq), text = kv.substr(eq + 1);
        c[key] = json::accept(text) ? json::parse(text) : json(text);
      }
      overrides["parameters"]["constants"] = c;
    }
  }

  RunContext ctx{threads, out, err};
  try {
    const json file = config_path.empty() ? json(nullptr) : report::load_json_file(config_path);
    const auto cfg = report::resolve(schemas.at(name), file, overrides);
    if (name == "cantor") return cmd_cantor(cfg, ctx);
    if (name == "renorm") return cmd_renorm(cfg, ctx);
    if (name == "attractor") return cmd_attractor(cfg, ctx);
    if (name == "tangency") return cmd_tangency(cfg, ctx);
    return cmd_verify(cfg, ctx);
  } catch (const report::ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return usage_error;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return usage_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return runtime_error;
  }
}

}  // namespace cubiclab::cli
