#pragma once

#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

#include "plateflow/grid.hpp"

namespace plateflow {

// Symbols of the half-space problem with mu_f = 1. Frequencies are physical:
// k is the time frequency, xi = |xi'| the lateral wave number.

/// sqrt(xi^2 + i k) on the principal branch; throws if Re <= 0.
cplx halfspace_root(double k, double xi);

/// q0 = [-i k (xi + sqrt(xi^2 + i k)) + k^2 / xi] eta. Throws excluded_mode for xi = 0 or k = 0.
cplx q0_symbol(double k, double xi, cplx eta);

struct HalfspaceProfiles {
  Eigen::MatrixXcd U;  // samples x 2, tangential velocity
  Eigen::VectorXcd V;  // normal velocity
  Eigen::VectorXcd p;
  cplx q0{0.0};
};

/// Closed-form decaying solution of the mode Stokes system in x3 > 0 driven by the
/// plate velocity: U(0) = 0, V(0) = -i k eta.
HalfspaceProfiles halfspace_profiles(double k, double xi1, double xi2, cplx eta, const Eigen::VectorXd& x3);

/// |xi|^4 - k^2 + i k mu_s |xi|^2 - k^2/|xi| + i k (|xi| + sqrt(|xi|^2 + i k)).
cplx coupled_plate_symbol(double k, double xi, double mu_s = 1.0);
/// The two damping groups of the coupled symbol.
cplx fluid_damping(double k, double xi);
cplx internal_damping(double k, double xi, double mu_s = 1.0);

/// 1 / coupled symbol; exactly 0 at k = 0 or xi = 0.
cplx multiplier_M(double k, double xi, double mu_s = 1.0);

struct UndampedValue {
  cplx value{0.0};
  bool singular = false;
};

/// 1 / (|xi|^4 - k^2) on the lattice; 0 at excluded modes, flagged at exact resonance.
/// With T = L = 2 pi the resonance test is exact integer arithmetic.
UndampedValue undamped_multiplier(int k, int m1, int m2, double period_t = two_pi, double period_x = two_pi);

enum class SymbolVariant { full, fluid_only, internal_only, undamped };
enum class ResonanceClass { resonant, near_resonant, damped };
std::string to_string(SymbolVariant v);
std::string to_string(ResonanceClass c);

/// Symbol of a variant: undamped part plus the selected damping groups.
cplx variant_symbol(SymbolVariant v, double k, double xi, double mu_s = 1.0);

struct LatticePoint {
  int k = 0, m1 = 0, m2 = 0;
  double omega = 0.0, xi = 0.0;
  cplx M{0.0};
  cplx weighted{0.0};  // (1 + k^2 + |xi|^4) M
  UndampedValue undamped;
  cplx fluid{0.0}, internal{0.0};
  cplx M_fluid_only{0.0}, M_internal_only{0.0};
  ResonanceClass cls[4] = {ResonanceClass::damped, ResonanceClass::damped, ResonanceClass::damped,
                           ResonanceClass::damped};  // indexed by SymbolVariant
};

/// Resonant: the variant symbol vanishes. Near-resonant: otherwise, with the
/// undamped part |xi|^4 - k^2 smaller in modulus than the full damping.
/// Damped: the rest.
LatticePoint evaluate_point(int k, int m1, int m2, double period_t = two_pi, double period_x = two_pi,
                            double mu_s = 1.0);

struct ScanOptions {
  int k_max = 10000;
  int xi_max = 100;  // lattice radius: m1^2 + m2^2 <= xi_max^2
  double period_t = two_pi;
  double period_x = two_pi;
  double mu_s = 1.0;
};

struct DecayFit {
  std::string ray;
  double exponent = 0.0;
  double r_min = 0.0, r_max = 0.0;
};

struct ScanReport {
  ScanOptions options;
  double sup_weighted = 0.0;
  LatticePoint argmax;
  double max_ratio = 0.0;  // |undamped| / |M| over non-singular near-resonant points
  LatticePoint ratio_argmax;
  long singular_points = 0;
  long evaluated = 0;
  std::vector<DecayFit> decay;
};

/// Lattice scan of the weighted multiplier over 1 <= |k| <= k_max and the lateral
/// disc; symbols depend on |xi'| and are conjugate symmetric in k, so each
/// (k >= 1, m1^2 + m2^2) class is evaluated once. Ties go to the smallest (|k|, |xi'|).
ScanReport boundedness_scan(const ScanOptions& o);

/// Least-squares slope of log|M| against log r along (k, xi) = (r^a c_k, r^b c_xi).
DecayFit fit_decay(const std::string& name, double ak, double ck, double bxi, double cxi, double r_min, double r_max,
                   double mu_s = 1.0);

struct ResonanceReport {
  ScanOptions options;
  std::vector<LatticePoint> points;
  long count[4][3] = {};  // [variant][class]
};

/// Every lattice point with |k| <= k_max and |m_i| <= xi_max.
ResonanceReport resonance_report(const ScanOptions& o);

void write_points_csv(std::ostream& os, const std::vector<LatticePoint>& points);
void write_resonance_csv(std::ostream& os, const ResonanceReport& r);
nlohmann::json to_json(const LatticePoint& p);
nlohmann::json to_json(const ScanReport& r);
nlohmann::json to_json(const ResonanceReport& r);

}  // namespace plateflow
