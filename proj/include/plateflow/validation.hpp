#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "plateflow/mode_resolvent.hpp"

namespace plateflow {

/// Closed-form profile sum_r c_r x^{j_r} e^{a_r x} on [0, 1], with exact calculus.
class Profile {
 public:
  struct Term {
    cplx c;
    int power;
    cplx rate;
  };

  Profile() = default;
  static Profile constant(cplx c) { return monomial(c, 0); }
  static Profile monomial(cplx c, int power, cplx rate = 0.0);

  cplx operator()(double x) const;
  Profile derivative(int order = 1) const;
  /// Complex conjugate as a function of real x.
  Profile conj() const;
  Eigen::VectorXcd sample(const Eigen::VectorXd& x) const;

  Profile& operator+=(const Profile& o);
  Profile& operator*=(cplx s);
  friend Profile operator+(Profile a, const Profile& b) { return a += b; }
  friend Profile operator-(Profile a, const Profile& b);
  friend Profile operator*(cplx s, Profile a) { return a *= s; }
  friend Profile operator*(const Profile& a, const Profile& b);

  const std::vector<Term>& terms() const { return terms_; }

 private:
  std::vector<Term> terms_;
};

struct ManufacturedOptions {
  int k_max = 1;        // populated time modes |k| <= k_max
  int m_max = 1;        // populated lateral modes |m_i| <= m_max
  int terms = 2;        // exponential terms per interior profile
  double amplitude = 1.0;
  double rate = 1.0;    // scale of the x3 exponents
  bool divergence_free = false;  // g = 0 construction
  bool with_plate = true;        // eta != 0
  double mu_f = 1.0;
  double mu_s = 1.0;
};

/// Exact (u*, p*, eta*) per mode plus the data obtained by applying the linear operators.
struct ManufacturedCase {
  struct Mode {
    ModeIndex mode;
    std::array<Profile, 3> u;
    Profile p;
    cplx eta{0.0};
    std::array<Profile, 3> f;
    Profile g;
    cplx h{0.0};
  };

  struct Fields {
    SpectralField u, p;
    PlateField eta;
    SpectralField f, g;
    PlateField h;
  };

  ManufacturedOptions options;
  double period_t = two_pi, period_x = two_pi;
  std::uint64_t seed = 0;
  std::vector<Mode> modes;

  /// Node samples of all fields on a grid with the same periods.
  Fields on_grid(const TorusGrid& grid) const;
  /// Max of |u*(0) + d_t eta* e3|, |u*(1)|, |mean eta*| over the populated modes.
  double constraint_residual() const;
};

ManufacturedCase make_manufactured(std::uint64_t seed, const ManufacturedOptions& options, double period_t = two_pi,
                                   double period_x = two_pi);

struct CrossValidationReport {
  double path_discrepancy = 0.0;    // X-norm of (lift path) - (direct path)
  double lift_truth_error = 0.0;    // relative X-norm error against the manufactured truth
  double direct_truth_error = 0.0;
  double truth_norm = 0.0;
  std::string pressure_convention;
};

CrossValidationReport cross_validate_linear(const ManufacturedCase& c, const SolverConfig& cfg);

/// Spectral derivative along direction 0 (t), 1, 2 (x'), 3 (x3) against a sixth-order
/// centered difference with step = lattice (or node) spacing / oversample.
double fd_check(const SpectralField& f, int direction, int oversample = 64);

struct EmbeddingParams {
  int m = 2;
  int mt = 0;                 // M_t
  std::array<int, 3> mx{};    // spatial multi-index (plate uses the first two)
  double alpha = 2.0;
  double p = INFINITY;        // space exponent
  double r = INFINITY;        // time exponent
  double q = 2.0;
};

/// ||d_x^{m_x} d_t^{M_t} u||_{L^r(T; L^p)} / ||u||_{W^{m,2m,q}}; n = 3 for the slab, 2 for the plate.
double embedding_ratio(const SpectralField& u, const EmbeddingParams& e);
double embedding_ratio(const PlateField& eta, const EmbeddingParams& e);
/// Throws Error(unsupported) naming the violated inequality.
void check_embedding_params(const EmbeddingParams& e, int n);

/// Seeded real band-limited data: per mode and component, x3 profiles sum_{j < N_z} c_j T_j(2 x3 - 1)
/// with c_j ~ N(0, 1) e^{-j/4}, so the top Chebyshev coefficient is zero.
SpectralField random_field(const TorusGrid& grid, int components, std::uint64_t seed);
/// Plate data with zero lateral mean at every time mode.
PlateField random_plate(const TorusGrid& grid, std::uint64_t seed);
/// Scalar data whose lateral-mean profile integrates to zero for every k.
SpectralField random_divergence(const TorusGrid& grid, std::uint64_t seed);

/// Oracle suite on `cases` seeded draws: transform round trip, FD derivatives,
/// manufactured constraints, dual-path cross validation, lift residuals, embedding
/// ratios. Cross validation runs at N_z >= 32. Result: {"pass", "oracles": [...]}.
nlohmann::json run_validation_suite(const SolverConfig& cfg, int cases, std::uint64_t seed);

}  // namespace plateflow
