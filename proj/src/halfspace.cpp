#include "plateflow/halfspace.hpp"

#include <cmath>
#include <mutex>
#include <ostream>

#include "plateflow/errors.hpp"
#include "plateflow/parallel.hpp"

namespace plateflow {

cplx halfspace_root(double k, double xi) {
  const cplx r = std::sqrt(cplx(xi * xi, k));
  if (!(r.real() > 0.0)) throw Error(ErrorKind::degenerate, "principal root has nonpositive real part");
  return r;
}

static void require_oscillatory(double k, double xi) {
  if (k == 0.0) throw Error(ErrorKind::excluded_mode, "half-space symbols need k != 0");
  if (xi == 0.0) throw Error(ErrorKind::excluded_mode, "half-space symbols need xi' != 0");
}

cplx q0_symbol(double k, double xi, cplx eta) {
  require_oscillatory(k, xi);
  return (-I * k * (xi + halfspace_root(k, xi)) + k * k / xi) * eta;
}

HalfspaceProfiles halfspace_profiles(double k, double xi1, double xi2, cplx eta, const Eigen::VectorXd& x3) {
  const double xi = std::hypot(xi1, xi2);
  const cplx q0 = q0_symbol(k, xi, eta);
  const cplx lam = halfspace_root(k, xi);
  HalfspaceProfiles out;
  out.q0 = q0;
  out.U.resize(x3.size(), 2);
  out.V.resize(x3.size());
  out.p.resize(x3.size());
  const cplx vs = xi * q0 / (I * k);
  const cplx vf = -(I * k * eta + vs);
  for (Eigen::Index j = 0; j < x3.size(); ++j) {
    const double es = std::exp(-xi * x3(j));
    const cplx ef = std::exp(-lam * x3(j));
    out.U(j, 0) = xi1 * q0 / k * (ef - es);
    out.U(j, 1) = xi2 * q0 / k * (ef - es);
    out.V(j) = vs * es + vf * ef;
    out.p(j) = q0 * es;
  }
  return out;
}

cplx fluid_damping(double k, double xi) {
  require_oscillatory(k, xi);
  return -k * k / xi + I * k * (xi + halfspace_root(k, xi));
}

cplx internal_damping(double k, double xi, double mu_s) { return I * k * mu_s * xi * xi; }

cplx coupled_plate_symbol(double k, double xi, double mu_s) {
  return xi * xi * xi * xi - k * k + internal_damping(k, xi, mu_s) + fluid_damping(k, xi);
}

cplx multiplier_M(double k, double xi, double mu_s) {
  if (k == 0.0 || xi == 0.0) return 0.0;
  return 1.0 / coupled_plate_symbol(k, xi, mu_s);
}

static bool unit_periods(double period_t, double period_x) { return period_t == two_pi && period_x == two_pi; }

UndampedValue undamped_multiplier(int k, int m1, int m2, double period_t, double period_x) {
  if (k == 0 || (m1 == 0 && m2 == 0)) return {};
  const long long n = static_cast<long long>(m1) * m1 + static_cast<long long>(m2) * m2;
  const double om = two_pi * k / period_t;
  const double xi2 = std::pow(two_pi / period_x, 2) * static_cast<double>(n);
  const double d = xi2 * xi2 - om * om;
  bool singular;
  if (unit_periods(period_t, period_x)) singular = n * n == static_cast<long long>(k) * k;
  else singular = std::abs(d) <= 1e-12 * (xi2 * xi2 + om * om);
  if (singular) return {0.0, true};
  return {1.0 / d, false};
}

std::string to_string(SymbolVariant v) {
  switch (v) {
    case SymbolVariant::full: return "full";
    case SymbolVariant::fluid_only: return "fluid_only";
    case SymbolVariant::internal_only: return "internal_only";
    case SymbolVariant::undamped: return "undamped";
  }
  return "?";
}

std::string to_string(ResonanceClass c) {
  switch (c) {
    case ResonanceClass::resonant: return "resonant";
    case ResonanceClass::near_resonant: return "near-resonant";
    case ResonanceClass::damped: return "damped";
  }
  return "?";
}

cplx variant_symbol(SymbolVariant v, double k, double xi, double mu_s) {
  const cplx base = xi * xi * xi * xi - k * k;
  switch (v) {
    case SymbolVariant::full: return base + fluid_damping(k, xi) + internal_damping(k, xi, mu_s);
    case SymbolVariant::fluid_only: return base + fluid_damping(k, xi);
    case SymbolVariant::internal_only: return base + internal_damping(k, xi, mu_s);
    case SymbolVariant::undamped: return base;
  }
  return base;
}

LatticePoint evaluate_point(int k, int m1, int m2, double period_t, double period_x, double mu_s) {
  LatticePoint p;
  p.k = k;
  p.m1 = m1;
  p.m2 = m2;
  p.omega = two_pi * k / period_t;
  p.xi = two_pi / period_x * std::hypot(static_cast<double>(m1), static_cast<double>(m2));
  p.undamped = undamped_multiplier(k, m1, m2, period_t, period_x);
  if (k == 0 || (m1 == 0 && m2 == 0)) return p;
  const double om = p.omega, xi = p.xi;
  const double base = xi * xi * xi * xi - om * om;
  p.fluid = fluid_damping(om, xi);
  p.internal = internal_damping(om, xi, mu_s);
  const cplx full = base + p.fluid + p.internal;
  const cplx fl = base + p.fluid;
  const cplx in = base + p.internal;
  p.M = 1.0 / full;
  p.M_fluid_only = 1.0 / fl;
  p.M_internal_only = 1.0 / in;
  p.weighted = (1.0 + om * om + xi * xi * xi * xi) * p.M;
  const bool near = std::abs(base) < std::abs(p.fluid + p.internal);
  auto cls = [&](cplx s) {
    if (s == cplx(0.0)) return ResonanceClass::resonant;
    return near ? ResonanceClass::near_resonant : ResonanceClass::damped;
  };
  p.cls[static_cast<int>(SymbolVariant::full)] = cls(full);
  p.cls[static_cast<int>(SymbolVariant::fluid_only)] = cls(fl);
  p.cls[static_cast<int>(SymbolVariant::internal_only)] = cls(in);
  p.cls[static_cast<int>(SymbolVariant::undamped)] = p.undamped.singular ? ResonanceClass::resonant : cls(base);
  return p;
}

// ---------------------------------------------------------------- scans

namespace {

struct Best {
  double value = -1.0;
  int k = 0;
  long n = 0;
  int m1 = 0, m2 = 0;
  // larger value wins; ties go to the smallest (|k|, |xi'|)
  bool beats(double v, int kk, long nn) const {
    if (v != value) return v > value;
    if (kk != k) return kk < k;
    return nn < n;
  }
  void offer(double v, int kk, long nn, int a, int b) {
    if (beats(v, kk, nn)) *this = {v, kk, nn, a, b};
  }
  void merge(const Best& o) {
    if (o.value >= 0.0) offer(o.value, o.k, o.n, o.m1, o.m2);
  }
};

}  // namespace

DecayFit fit_decay(const std::string& name, double ak, double ck, double bxi, double cxi, double r_min, double r_max,
                   double mu_s) {
  const int samples = 64;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < samples; ++i) {
    const double lr = std::log(r_min) + (std::log(r_max) - std::log(r_min)) * i / (samples - 1);
    const double r = std::exp(lr);
    const double ly = std::log(std::abs(multiplier_M(ck * std::pow(r, ak), cxi * std::pow(r, bxi), mu_s)));
    sx += lr;
    sy += ly;
    sxx += lr * lr;
    sxy += lr * ly;
  }
  const double slope = (samples * sxy - sx * sy) / (samples * sxx - sx * sx);
  return {name, slope, r_min, r_max};
}

ScanReport boundedness_scan(const ScanOptions& o) {
  if (o.k_max < 1 || o.xi_max < 1) throw Error(ErrorKind::config, "scan ranges must be at least 1");
  const long nmax = static_cast<long>(o.xi_max) * o.xi_max;
  // smallest representation m1 >= m2 >= 0 of each n
  std::vector<std::pair<int, int>> rep(nmax + 1, {-1, -1});
  for (int a = 0; a <= o.xi_max; ++a)
    for (int b = 0; b <= a; ++b) {
      const long n = static_cast<long>(a) * a + static_cast<long>(b) * b;
      if (n == 0 || n > nmax) continue;
      if (rep[n].first < 0) rep[n] = {a, b};
    }
  std::vector<long> classes;
  for (long n = 1; n <= nmax; ++n)
    if (rep[n].first >= 0) classes.push_back(n);

  const bool exact = unit_periods(o.period_t, o.period_x);
  const double ct = two_pi / o.period_t, cx = two_pi / o.period_x;
  const std::size_t chunks = std::min<std::size_t>(classes.size(), 256);
  std::vector<Best> best(chunks), ratio(chunks);
  std::vector<long> singular(chunks, 0);
  parallel_for(chunks, [&](std::size_t c) {
    for (std::size_t i = c; i < classes.size(); i += chunks) {
      const long n = classes[i];
      const double xi2 = cx * cx * static_cast<double>(n), xi = std::sqrt(xi2), xi4 = xi2 * xi2;
      for (int k = 1; k <= o.k_max; ++k) {
        const double om = ct * k;
        const double base = xi4 - om * om;
        const cplx damp = -om * om / xi + I * om * (xi + halfspace_root(om, xi)) + I * om * o.mu_s * xi2;
        const cplx sym = base + damp;
        const double w = (1.0 + om * om + xi4) / std::abs(sym);
        best[c].offer(w, k, n, rep[n].first, rep[n].second);
        const bool sing = exact ? (n == k) : std::abs(base) <= 1e-12 * (xi4 + om * om);
        if (sing) {
          ++singular[c];
          continue;
        }
        if (std::abs(base) < std::abs(damp)) ratio[c].offer(std::abs(sym) / std::abs(base), k, n, rep[n].first, rep[n].second);
      }
    }
  });
  Best b, r;
  ScanReport out;
  out.options = o;
  for (std::size_t c = 0; c < chunks; ++c) {
    b.merge(best[c]);
    r.merge(ratio[c]);
    out.singular_points += singular[c];
  }
  out.evaluated = static_cast<long>(classes.size()) * o.k_max;
  out.sup_weighted = b.value;
  out.argmax = evaluate_point(b.k, b.m1, b.m2, o.period_t, o.period_x, o.mu_s);
  if (r.value >= 0.0) {
    out.max_ratio = r.value;
    out.ratio_argmax = evaluate_point(r.k, r.m1, r.m2, o.period_t, o.period_x, o.mu_s);
  }
  const double kmax = ct * o.k_max, ximax = cx * o.xi_max;
  out.decay.push_back(fit_decay("k -> inf at |xi'| = 1", 1.0, 1.0, 0.0, 1.0, std::sqrt(kmax), kmax, o.mu_s));
  out.decay.push_back(fit_decay("|xi'| -> inf at k = 1", 0.0, 1.0, 1.0, 1.0, std::sqrt(ximax), ximax, o.mu_s));
  out.decay.push_back(fit_decay("k = |xi'| -> inf", 1.0, 1.0, 1.0, 1.0, std::sqrt(ximax), ximax, o.mu_s));
  out.decay.push_back(fit_decay("k = |xi'|^2 -> inf", 2.0, 1.0, 1.0, 1.0, std::sqrt(ximax), ximax, o.mu_s));
  return out;
}

ResonanceReport resonance_report(const ScanOptions& o) {
  ResonanceReport r;
  r.options = o;
  for (int k = -o.k_max; k <= o.k_max; ++k)
    for (int m1 = -o.xi_max; m1 <= o.xi_max; ++m1)
      for (int m2 = -o.xi_max; m2 <= o.xi_max; ++m2) {
        const LatticePoint p = evaluate_point(k, m1, m2, o.period_t, o.period_x, o.mu_s);
        if (k != 0 && (m1 != 0 || m2 != 0))
          for (int v = 0; v < 4; ++v) ++r.count[v][static_cast<int>(p.cls[v])];
        r.points.push_back(p);
      }
  return r;
}

// ---------------------------------------------------------------- export

void write_points_csv(std::ostream& os, const std::vector<LatticePoint>& points) {
  os.precision(17);
  os << "k,xi1,xi2,re_M,im_M,abs_weighted,abs_undamped,class\n";
  for (const LatticePoint& p : points) {
    os << p.k << ',' << p.m1 << ',' << p.m2 << ',' << p.M.real() << ',' << p.M.imag() << ',' << std::abs(p.weighted)
       << ',';
    if (p.undamped.singular) os << "inf";
    else os << std::abs(p.undamped.value);
    os << ',' << to_string(p.cls[static_cast<int>(SymbolVariant::undamped)]) << '\n';
  }
}

void write_resonance_csv(std::ostream& os, const ResonanceReport& r) {
  os.precision(17);
  os << "k,xi1,xi2,abs_fluid_damping,abs_internal_damping,undamped_symbol,undamped_singular,"
        "abs_M,abs_M_fluid_only,abs_M_internal_only,class_full,class_fluid_only,class_internal_only,class_undamped\n";
  for (const LatticePoint& p : r.points) {
    os << p.k << ',' << p.m1 << ',' << p.m2 << ',' << std::abs(p.fluid) << ',' << std::abs(p.internal) << ','
       << p.xi * p.xi * p.xi * p.xi - p.omega * p.omega << ',' << (p.undamped.singular ? 1 : 0) << ',' << std::abs(p.M)
       << ',' << std::abs(p.M_fluid_only) << ',' << std::abs(p.M_internal_only);
    for (int v = 0; v < 4; ++v) os << ',' << to_string(p.cls[v]);
    os << '\n';
  }
}

static nlohmann::json cjson(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

nlohmann::json to_json(const LatticePoint& p) {
  nlohmann::json j{{"k", p.k}, {"xi", {p.m1, p.m2}}, {"M", cjson(p.M)}, {"abs_weighted", std::abs(p.weighted)},
                   {"undamped_singular", p.undamped.singular}, {"fluid_damping", cjson(p.fluid)},
                   {"internal_damping", cjson(p.internal)}};
  if (!p.undamped.singular) j["undamped"] = cjson(p.undamped.value);
  for (int v = 0; v < 4; ++v) j["class"][to_string(static_cast<SymbolVariant>(v))] = to_string(p.cls[v]);
  return j;
}

nlohmann::json to_json(const ScanReport& r) {
  nlohmann::json j;
  j["k_max"] = r.options.k_max;
  j["xi_max"] = r.options.xi_max;
  j["mu_s"] = r.options.mu_s;
  j["sup_weighted"] = r.sup_weighted;
  j["argmax"] = to_json(r.argmax);
  j["max_undamped_over_damped"] = r.max_ratio;
  j["ratio_argmax"] = to_json(r.ratio_argmax);
  j["singular_points"] = r.singular_points;
  j["evaluated_classes"] = r.evaluated;
  for (const DecayFit& d : r.decay)
    j["decay_fits"].push_back({{"ray", d.ray}, {"exponent", d.exponent}, {"r_min", d.r_min}, {"r_max", d.r_max}});
  return j;
}

nlohmann::json to_json(const ResonanceReport& r) {
  nlohmann::json j;
  j["k_max"] = r.options.k_max;
  j["xi_max"] = r.options.xi_max;
  j["points"] = r.points.size();
  for (int v = 0; v < 4; ++v) {
    auto& c = j["classification"][to_string(static_cast<SymbolVariant>(v))];
    for (int k = 0; k < 3; ++k) c[to_string(static_cast<ResonanceClass>(k))] = r.count[v][k];
  }
  return j;
}

}  // namespace plateflow
