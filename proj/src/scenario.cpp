#include "plateflow/scenario.hpp"

#include <fstream>
#include <cmath>
#include <functional>
#include <sstream>

#include "plateflow/errors.hpp"
#include "plateflow/expression.hpp"
#include "plateflow/field_io.hpp"

namespace plateflow {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, const std::string& where) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(ErrorKind::config, where + ": expected a boolean, got \"" + v + "\"");
}

double parse_number(const std::string& v, const std::string& where) {
  try {
    return evaluate_constant(v);
  } catch (const Error& e) {
    throw Error(ErrorKind::config, where + ": " + e.what());
  }
}

int parse_int(const std::string& v, const std::string& where) {
  const double d = parse_number(v, where);
  if (d != std::floor(d) || std::abs(d) > 2e9) throw Error(ErrorKind::config, where + ": expected an integer, got \"" + v + "\"");
  return static_cast<int>(d);
}

void check_expression(const std::string& v, const std::string& where) {
  try {
    Expression::parse(v);
  } catch (const Error& e) {
    throw Error(ErrorKind::config, where + ": " + e.what());
  }
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  auto num = [](double SolverConfig::*field) {
    return Setter([field](ScenarioConfig& c, const std::string& v, const std::string& w) { c.solver.*field = parse_number(v, w); });
  };
  auto integer = [](int SolverConfig::*field) {
    return Setter([field](ScenarioConfig& c, const std::string& v, const std::string& w) { c.solver.*field = parse_int(v, w); });
  };
  auto boolean = [](bool SolverConfig::*field) {
    return Setter([field](ScenarioConfig& c, const std::string& v, const std::string& w) { c.solver.*field = parse_bool(v, w); });
  };
  auto own_int = [](int ScenarioConfig::*field) {
    return Setter([field](ScenarioConfig& c, const std::string& v, const std::string& w) { c.*field = parse_int(v, w); });
  };
  auto expr = [](std::string ScenarioConfig::*field) {
    return Setter([field](ScenarioConfig& c, const std::string& v, const std::string& w) {
      check_expression(v, w);
      c.*field = v;
    });
  };
  auto text = [](std::string ScenarioConfig::*field) {
    return Setter([field](ScenarioConfig& c, const std::string& v, const std::string&) { c.*field = v; });
  };
  auto component = [](int i) {
    return Setter([i](ScenarioConfig& c, const std::string& v, const std::string& w) {
      check_expression(v, w);
      c.f[static_cast<std::size_t>(i)] = v;
    });
  };
  static const std::map<std::string, Setter> table = {
      {"period_t", num(&SolverConfig::period_t)},
      {"period_x", num(&SolverConfig::period_x)},
      {"mu_f", num(&SolverConfig::mu_f)},
      {"mu_s", num(&SolverConfig::mu_s)},
      {"nt", integer(&SolverConfig::nt)},
      {"nx", integer(&SolverConfig::nx)},
      {"nz", integer(&SolverConfig::nz)},
      {"tol_eq", num(&SolverConfig::tol_eq)},
      {"tol_bc", num(&SolverConfig::tol_bc)},
      {"tol_nl", num(&SolverConfig::tol_nl)},
      {"picard_tol", num(&SolverConfig::picard_tol)},
      {"max_iter", integer(&SolverConfig::max_iter)},
      {"eps0", num(&SolverConfig::eps0)},
      {"q", num(&SolverConfig::q)},
      {"dealias", boolean(&SolverConfig::dealias)},
      {"check_residuals", boolean(&SolverConfig::check_residuals)},
      {"f1", component(0)},
      {"f2", component(1)},
      {"f3", component(2)},
      {"g", expr(&ScenarioConfig::g)},
      {"h", expr(&ScenarioConfig::h)},
      {"f_file", text(&ScenarioConfig::f_file)},
      {"g_file", text(&ScenarioConfig::g_file)},
      {"h_file", text(&ScenarioConfig::h_file)},
      {"out", text(&ScenarioConfig::out)},
      {"amplitude", [](ScenarioConfig& c, const std::string& v, const std::string& w) { c.amplitude = parse_number(v, w); }},
      {"k_max", own_int(&ScenarioConfig::k_max)},
      {"xi_max", own_int(&ScenarioConfig::xi_max)},
      {"report_k", own_int(&ScenarioConfig::report_k)},
      {"report_xi", own_int(&ScenarioConfig::report_xi)},
      {"cases", own_int(&ScenarioConfig::cases)},
      {"seed", [](ScenarioConfig& c, const std::string& v, const std::string& w) {
         const int s = parse_int(v, w);
         if (s < 0) throw Error(ErrorKind::config, w + ": seed must be >= 0");
         c.seed = static_cast<std::uint64_t>(s);
       }},
  };
  return table;
}

}  // namespace

void ScenarioConfig::validate() const {
  const SolverConfig& s = solver;
  auto bad = [](const std::string& what) { throw Error(ErrorKind::config, what); };
  if (!(s.period_t > 0.0) || !(s.period_x > 0.0)) bad("periods must be positive");
  if (!(s.mu_f > 0.0)) bad("mu_f must be positive");
  if (s.mu_s < 0.0) bad("mu_s must be >= 0");
  if (s.nt < 3 || s.nt % 2 == 0 || s.nt > 129) bad("nt must be odd in [3, 129]");
  if (s.nx < 3 || s.nx % 2 == 0 || s.nx > 129) bad("nx must be odd in [3, 129]");
  if (s.nz < 4 || s.nz > 256) bad("nz must be in [4, 256]");
  if (!(s.q > 1.0)) bad("q must be > 1");
  if (s.max_iter < 1) bad("max_iter must be >= 1");
  if (!(s.eps0 > 0.0)) bad("eps0 must be positive");
  if (k_max < 1 || xi_max < 1) bad("scan ranges must be >= 1");
  if (report_k < 1 || report_xi < 1) bad("report ranges must be >= 1");
  if (cases < 1) bad("cases must be >= 1");
}

void ScenarioConfig::require_damped() const {
  if (!(solver.mu_s > 0.0)) throw Error(ErrorKind::config, "the coupled solver needs mu_s > 0; mu_s = 0 is for multiplier studies");
}

nlohmann::json ScenarioConfig::to_json() const {
  const SolverConfig& s = solver;
  return {{"period_t", s.period_t}, {"period_x", s.period_x}, {"mu_f", s.mu_f}, {"mu_s", s.mu_s},
          {"nt", s.nt}, {"nx", s.nx}, {"nz", s.nz}, {"f", f}, {"g", g}, {"h", h},
          {"f_file", f_file}, {"g_file", g_file}, {"h_file", h_file}, {"amplitude", amplitude},
          {"tolerances", {{"tol_eq", s.tol_eq}, {"tol_bc", s.tol_bc}, {"tol_nl", s.tol_nl}, {"picard_tol", s.picard_tol}}},
          {"max_iter", s.max_iter}, {"eps0", s.eps0}, {"q", s.q}, {"dealias", s.dealias},
          {"check_residuals", s.check_residuals}, {"k_max", k_max}, {"xi_max", xi_max},
          {"report_k", report_k}, {"report_xi", report_xi}, {"cases", cases}, {"seed", seed}};
}

std::uint64_t ScenarioConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : to_json().dump()) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
  ScenarioConfig c;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string where = source + ":" + std::to_string(number);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::config, where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (value.empty()) throw Error(ErrorKind::config, where + ": empty value for " + key);
    const auto it = setters().find(key);
    if (it == setters().end()) throw Error(ErrorKind::config, where + ": unknown key \"" + key + "\"");
    if (c.raw.count(key)) throw Error(ErrorKind::config, where + ": duplicate key \"" + key + "\"");
    it->second(c, value, where);
    c.raw[key] = value;
  }
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

SpectralField load_forcing(const ScenarioConfig& c, const TorusGrid& grid) {
  SpectralField f(grid, 3, true);
  if (!c.f_file.empty()) {
    f = read_field(c.f_file, grid);
    if (f.components() != 3) throw Error(ErrorKind::config, c.f_file + ": forcing needs 3 components");
  } else {
    for (int i = 0; i < 3; ++i) f.set_component(i, sample_expression(grid, Expression::parse(c.f[static_cast<std::size_t>(i)])));
  }
  f *= c.amplitude;
  return f;
}

SpectralField load_divergence(const ScenarioConfig& c, const TorusGrid& grid) {
  SpectralField g = c.g_file.empty() ? sample_expression(grid, Expression::parse(c.g)) : read_field(c.g_file, grid);
  if (g.components() != 1) throw Error(ErrorKind::config, "divergence data must be scalar");
  g *= c.amplitude;
  return g;
}

PlateField load_plate_load(const ScenarioConfig& c, const TorusGrid& grid) {
  PlateField h = c.h_file.empty() ? sample_plate_expression(grid, Expression::parse(c.h)) : read_plate(c.h_file, grid);
  h *= c.amplitude;
  return h;
}

}  // namespace plateflow
