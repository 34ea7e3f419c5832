// plateflow: batch driver for the coupled fluid-plate solvers.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "plateflow/divergence_lift.hpp"
#include "plateflow/errors.hpp"
#include "plateflow/expression.hpp"
#include "plateflow/field_io.hpp"
#include "plateflow/halfspace.hpp"
#include "plateflow/mode_resolvent.hpp"
#include "plateflow/nonlinear.hpp"
#include "plateflow/norms.hpp"
#include "plateflow/parallel.hpp"
#include "plateflow/scenario.hpp"
#include "plateflow/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace plateflow;

namespace {

struct Options {
  std::string config;
  std::string out;
  int threads = 0;
  long long seed = -1;
};

struct ValidationFailure : std::runtime_error {
  ValidationFailure(const std::string& what, json report) : std::runtime_error(what), report(std::move(report)) {}
  json report;
};

class Timer {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

json residual_json(const LinearResidual& r) {
  return {{"momentum", r.momentum}, {"continuity", r.continuity}, {"bc_bottom", r.bc_bottom},
          {"bc_top", r.bc_top},     {"plate", r.plate},           {"plate_mean", r.plate_mean},
          {"max", r.max()}};
}

class Run {
 public:
  Run(std::string command, const Options& o) : command_(std::move(command)) {
    cfg_ = load_config(o.config);
    if (o.seed >= 0) cfg_.seed = static_cast<std::uint64_t>(o.seed);
    out_ = o.out.empty() ? cfg_.out : o.out;
    fs::create_directories(out_);
    manifest_ = {{"subcommand", command_},
                 {"config_file", o.config},
                 {"config", cfg_.to_json()},
                 {"config_hash", hex(cfg_.hash())},
                 {"tolerances",
                  {{"tol_eq", cfg_.solver.tol_eq},
                   {"tol_bc", cfg_.solver.tol_bc},
                   {"tol_nl", cfg_.solver.tol_nl},
                   {"picard_tol", cfg_.solver.picard_tol}}},
                 {"seed", cfg_.seed},
                 {"threads", thread_count()}};
  }

  const ScenarioConfig& cfg() const { return cfg_; }
  std::string path(const std::string& name) const { return (fs::path(out_) / name).string(); }
  json& manifest() { return manifest_; }
  void output(const std::string& name) { manifest_["outputs"].push_back(name); }

  void finish() {
    manifest_["timings"]["total_seconds"] = timer_.seconds();
    std::ofstream os(path("manifest.json"));
    os << manifest_.dump(2) << "\n";
    if (!os) throw Error(ErrorKind::io, "cannot write " + path("manifest.json"));
  }

 private:
  std::string command_;
  ScenarioConfig cfg_;
  std::string out_;
  json manifest_;
  Timer timer_;
};

void write_fields(Run& run, const SolutionFields& s) {
  write_field(run.path("u.plf"), s.u);
  write_field(run.path("p.plf"), s.p);
  write_plate(run.path("eta.plf"), s.eta);
  for (const char* n : {"u.plf", "p.plf", "eta.plf"}) run.output(n);
}

json field_norms(const SolutionFields& s, double q) {
  return {{"u_parabolic", parabolic_norm(s.u, q)},
          {"p", sobolev_norm(s.p, {0.0, 1.0, q, NormDomain::slab})},
          {"eta_S", plate_s_norm(s.eta, q)},
          {"X", x_norm(s.u, s.p, s.eta, q)},
          {"u_sup", sup_norm(s.u)},
          {"eta_sup", sup_norm(s.eta)}};
}

void solve_linear(Run& run) {
  const ScenarioConfig& c = run.cfg();
  c.require_damped();
  const TorusGrid grid = c.solver.grid();
  Timer t;
  const SpectralField f = load_forcing(c, grid), g = load_divergence(c, grid);
  const PlateField h = load_plate_load(c, grid);
  const LinearSolution s = solve_linear_full(f, g, h, c.solver);
  run.manifest()["timings"]["solve_seconds"] = t.seconds();
  write_fields(run, s.fields);
  write_field(run.path("lift.plf"), s.lift);
  run.output("lift.plf");
  run.manifest()["residuals"] = residual_json(s.residual);
  run.manifest()["norms"] = field_norms(s.fields, c.solver.q);
  run.manifest()["norms"]["Y"] = s.y_norm;
  run.manifest()["empirical_constants"] = {{"apriori_X_over_Y", s.apriori_ratio}};
}

void solve_nonlinear(Run& run) {
  const ScenarioConfig& c = run.cfg();
  c.require_damped();
  if (!c.g_file.empty() || !Expression::parse(c.g).is_zero())
    throw Error(ErrorKind::config, "solve-nonlinear takes no divergence data; set g = 0");
  const TorusGrid grid = c.solver.grid();
  Forcing forcing = Forcing::zero(grid);
  if (!c.f_file.empty()) {
    forcing = Forcing::from_field(load_forcing(c, grid));
  } else {
    std::array<Expression, 3> e{Expression::parse(c.f[0]), Expression::parse(c.f[1]), Expression::parse(c.f[2])};
    for (const Expression& x : e) x.check_periodic(grid.period_t(), grid.period_x());
    const double a = c.amplitude;
    forcing = Forcing::from_function(grid, [e, a](double t, double x1, double x2, double y3, double* out) {
      for (int i = 0; i < 3; ++i) out[i] = a * e[static_cast<std::size_t>(i)](t, x1, x2, y3);
    });
  }
  const PlateField h = load_plate_load(c, grid);
  Timer t;
  const PicardResult r = picard_solve(forcing, h, c.solver);
  run.manifest()["timings"]["solve_seconds"] = t.seconds();
  write_fields(run, r.fields);

  std::ofstream csv(run.path("picard.csv"));
  csv << "iteration,x_norm,step,ratio,s_norm,sup_eta,linear_residual,seconds\n" << std::setprecision(17);
  for (const PicardStep& s : r.trace)
    csv << s.iteration << ',' << s.x_norm << ',' << s.step << ',' << s.ratio << ',' << s.s_norm << ',' << s.sup_eta
        << ',' << s.linear_residual << ',' << s.seconds << '\n';
  run.output("picard.csv");

  json& m = run.manifest();
  m["picard"] = r.trace_json();
  m["residuals"] = residual_json(r.residual.equations);
  m["norms"] = field_norms(r.fields, c.solver.q);
  const SmallnessReport gate = smallness_check(r.fields.eta, c.solver.eps0, c.solver.q);
  m["smallness"] = {{"pass", gate.pass}, {"s_norm", gate.s_norm}, {"sup_eta", gate.sup_eta},
                    {"sup_inverse", gate.sup_inverse}, {"margin", gate.margin}};
  const BoundRatios b = nonlinear_bound_ratios(r.fields.u, r.fields.p, r.fields.eta, c.solver.eps0, c.solver.q,
                                               c.solver.mu_f, c.solver.dealias);
  double max_ratio = 0.0;
  for (std::size_t i = 1; i < r.trace.size(); ++i) max_ratio = std::max(max_ratio, r.trace[i].ratio);
  m["empirical_constants"] = {{"contraction_ratio_max", max_ratio},
                              {"bound_Rf", b.Rf}, {"bound_Rd", b.Rd}, {"bound_Reta", b.Reta}, {"bound_E", b.E}};
}

void multiplier_scan(Run& run) {
  const ScenarioConfig& c = run.cfg();
  ScanOptions o;
  o.k_max = c.k_max;
  o.xi_max = c.xi_max;
  o.period_t = c.solver.period_t;
  o.period_x = c.solver.period_x;
  o.mu_s = c.solver.mu_s;
  Timer t;
  const ScanReport r = boundedness_scan(o);
  run.manifest()["timings"]["scan_seconds"] = t.seconds();
  run.manifest()["scan"] = to_json(r);

  std::ofstream decay(run.path("decay.csv"));
  decay << "ray,exponent,r_min,r_max\n" << std::setprecision(17);
  for (const DecayFit& d : r.decay) decay << d.ray << ',' << d.exponent << ',' << d.r_min << ',' << d.r_max << '\n';
  run.output("decay.csv");
  std::ofstream pts(run.path("extremes.csv"));
  write_points_csv(pts, {r.argmax, r.ratio_argmax});
  run.output("extremes.csv");
}

void resonance(Run& run) {
  const ScenarioConfig& c = run.cfg();
  ScanOptions o;
  o.k_max = c.report_k;
  o.xi_max = c.report_xi;
  o.period_t = c.solver.period_t;
  o.period_x = c.solver.period_x;
  o.mu_s = c.solver.mu_s;
  const ResonanceReport r = resonance_report(o);
  std::ofstream csv(run.path("resonance.csv"));
  write_resonance_csv(csv, r);
  run.output("resonance.csv");
  run.manifest()["resonance"] = to_json(r);
}

void lift_div(Run& run) {
  const ScenarioConfig& c = run.cfg();
  const TorusGrid grid = c.solver.grid();
  const SpectralField g = load_divergence(c, grid);
  Timer t;
  const LiftResult l = lift_divergence(g);
  run.manifest()["timings"]["lift_seconds"] = t.seconds();
  write_field(run.path("w.plf"), l.w);
  run.output("w.plf");
  const LiftRatios r = lift_estimate_check(g, l.w, c.solver.q);
  run.manifest()["residuals"] = {{"divergence", l.residual_div}, {"boundary", l.residual_bc}};
  run.manifest()["empirical_constants"] = {{"gradient_ratio", r.gradient}, {"negative_norm_ratio", r.negative}};
}

void validate(Run& run) {
  const ScenarioConfig& c = run.cfg();
  Timer t;
  const json report = run_validation_suite(c.solver, c.cases, c.seed);
  run.manifest()["timings"]["suite_seconds"] = t.seconds();
  run.manifest()["validation"] = report;
  std::ofstream(run.path("validation.json")) << report.dump(2) << "\n";
  run.output("validation.json");
  if (!report["pass"].get<bool>()) {
    run.finish();
    throw ValidationFailure("validation suite failed", report);
  }
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::incompatible: return 2;
    case ErrorKind::divergence:
    case ErrorKind::degenerate: return 3;
    case ErrorKind::solver: return 4;
    default: return 1;
  }
}

int report_error(int code, const std::string& kind, const std::string& message, json extra = {}) {
  json j = {{"error", kind}, {"message", message}, {"exit_code", code}};
  if (!extra.is_null()) j.update(extra);
  std::cerr << j.dump() << std::endl;
  return code;
}

int threads_from_env() {
  if (const char* v = std::getenv("PLATEFLOW_THREADS")) {
    try {
      return std::stoi(v);
    } catch (const std::exception&) {
      throw Error(ErrorKind::config, std::string("PLATEFLOW_THREADS is not an integer: ") + v);
    }
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-periodic fluid-plate solver"};
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"solve-linear", "linear coupled problem with lift of the divergence data"},
      {"solve-nonlinear", "Picard iteration for the moving-plate problem"},
      {"multiplier-scan", "lattice scan of the damped multiplier"},
      {"resonance-report", "classification of lattice points for each symbol variant"},
      {"lift-div", "right inverse of the divergence"},
      {"validate", "oracle suite"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory (overrides the config)");
    sub->add_option("--threads", opt.threads, "worker threads (default PLATEFLOW_THREADS)")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", opt.seed, "base seed (overrides the config)")->check(CLI::NonNegativeNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return report_error(1, "usage", e.what());
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    set_thread_count(opt.threads > 0 ? opt.threads : threads_from_env());
    Run run(command, opt);
    if (command == "solve-linear") solve_linear(run);
    else if (command == "solve-nonlinear") solve_nonlinear(run);
    else if (command == "multiplier-scan") multiplier_scan(run);
    else if (command == "resonance-report") resonance(run);
    else if (command == "lift-div") lift_div(run);
    else validate(run);
    run.finish();
    std::cout << run.path("manifest.json") << std::endl;
    return 0;
  } catch (const ValidationFailure& e) {
    return report_error(4, "validation", e.what(), {{"report", e.report}});
  } catch (const IncompatibleData& e) {
    return report_error(2, to_string(e.kind()), e.what(), {{"k", e.k()}});
  } catch (const PicardDivergence& e) {
    return report_error(3, to_string(e.kind()), e.what(), {{"trace", e.trace}});
  } catch (const Error& e) {
    return report_error(exit_code(e.kind()), to_string(e.kind()), e.what());
  } catch (const std::exception& e) {
    return report_error(1, "internal", e.what());
  }
}
