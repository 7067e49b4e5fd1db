#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nevdim/census.hpp"
#include "nevdim/covers.hpp"
#include "nevdim/nevanlinna.hpp"

namespace nevdim {

inline double theoretical_dimension(int m) { return (m + 2.0) / (m + 4.0); }
/// The earlier general upper bound (2m+4)/(m+6).
inline double bk_upper_bound(int m) { return (2.0 * m + 4.0) / (m + 6.0); }

/// S(t) = sum over the admissible tail of tau_j^t, tau_j = |b_j| / |a_j|^2.
struct PressureCurve {
  std::string census_name;
  double R = 0.0;
  int M = 1;
  std::vector<double> tau;
  std::vector<double> t_grid;
  std::vector<double> values;

  double operator()(double t) const;
};

PressureCurve pressure_curve(const Census& census, double R, const std::vector<double>& t_grid = {});

/// Fits tau_j ~ K j^-beta over the admissible tail and returns 1/beta.
/// FitUnstable when the two halves of the window disagree by more than 0.05.
double tail_critical_exponent(const Census& census, double R);

/// Root of sum_j (kappa tau_j)^t = 1 over the symbols M(R) .. M(R)+N-1,
/// kappa = 4 C1 C / R, by bisection to 1e-10.
double bowen_root(const Census& census, double R, int alphabet_size, double C = kDefaultC,
                  double C1 = kDefaultC1);
/// Same equation for explicit contraction factors. NoRoot when sum(0) <= 1
/// or some factor is not below 1.
double bowen_root_factors(const std::vector<double>& factors);

/// Per-depth density lower bounds Delta_l and diameter upper bounds d_l.
struct McMullenInput {
  std::vector<double> Delta;
  std::vector<double> d;
  std::string provenance;
};

/// 2 - sum_{k<=L} |log Delta_k| / |log d_L| at the deepest level L. For
/// geometric sequences this is the limsup itself.
double mcmullen_bound(const McMullenInput& in);

struct McMullenEstimate {
  double R = 0.0;
  int poles_in_annulus = 0;
  double density = 0.0;  // spherical density of the inner disks in A(R)
  double B = 0.0;        // density * R^(m/2+3)
  double B1 = 0.0;       // C max tau_j * R^(m/2+2)
  double Delta = 0.0;
  double d1 = 0.0;
  double raw = 0.0;    // the formula itself; negative at small R
  double value = 0.0;  // max(0, raw)
};

/// Measures B and B1 at R on A(R) = {R < |z| < 2R}; the census must reach 2R.
McMullenEstimate mcmullen_lower(const Census& census, double R, double C = kDefaultC);
/// 2 - (log B - (m/2+3) log R) / (log B1 - (m/2+2) log R).
double mcmullen_formula(int m, double B, double B1, double R);
McMullenInput mcmullen_input(const McMullenEstimate& est, int depth);

/// Exact spherical area of a Euclidean disk (a spherical cap), metric
/// 2|dz|/(1+|z|^2).
double spherical_cap_area(const Disk& disk);

struct EscapeRaster {
  Window window{0, 0, 0, 0};
  int nx = 0;
  int ny = 0;
  int N = 0;
  double R = 0.0;
  std::vector<OrbitClass> classes;  // row-major, top row first
  std::vector<int> steps;

  OrbitClass at(int ix, int iy) const { return classes[static_cast<std::size_t>(iy) * nx + ix]; }
  int step_at(int ix, int iy) const { return steps[static_cast<std::size_t>(iy) * nx + ix]; }
};

EscapeRaster escape_grid(const NevanlinnaFunction& f, const Window& window, int nx, int ny, int N, double R,
                         int threads = 1);

struct BoxCountReport {
  std::vector<double> scales;  // epsilon
  std::vector<double> counts;  // N(epsilon)
  double slope = 0.0;
  std::string source;
};

/// Boxes are the cover's disks: N_l = disks at level l, epsilon_l = their
/// geometric-mean diameter (entropy over Lyapunov exponent for a uniform cover).
BoxCountReport box_count(const CylinderCover& cover);
/// Boxes of k x k pixels, k in `block_sizes`, counting blocks with a survivor.
BoxCountReport box_count(const EscapeRaster& raster, const std::vector<int>& block_sizes);
/// 2^l disks of diameter 3^-l at the middle-thirds intervals, l = 1..depth.
CylinderCover middle_thirds_cover(int depth);

struct DimensionOptions {
  double R = 100.0;
  std::vector<int> alphabet_sizes{100, 1000, 10000};
  std::vector<double> R_ladder{1e2, 1e3, 1e4, 1e5};
  double C = kDefaultC;
  double C1 = kDefaultC1;
  int box_depth = 0;  // 0 skips the cover box count
  int box_symbols = 30;
  double box_R = 10.0;
  double ordering_tol = 0.05;
  /// Record cap when a synthetic law is materialized for one estimator.
  long long synthetic_record_cap = 2000000;
};

/// |a_j| = c_mod j^(2/(m+2)), b_j = c_res j^(-m/(m+2)).
struct SyntheticLaw {
  int m = 0;
  double c_mod = 1.0;
  double c_res = 1.0;
  std::vector<double> rays;
};

struct BowenEntry {
  int N = 0;
  double root = 0.0;
  std::string error;
};

struct McMullenEntry {
  double R = 0.0;
  McMullenEstimate estimate;
  std::string error;
};

struct OrderingCheck {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct DimensionReport {
  int m = 0;
  std::string census_name;
  bool synthetic = false;
  double theoretical = 0.0;
  double bk_upper = 0.0;
  std::optional<double> tail_exponent;
  std::string tail_error;
  std::vector<BowenEntry> bowen;
  std::vector<McMullenEntry> mcmullen;
  std::optional<BoxCountReport> box;
  std::string box_error;
  std::vector<OrderingCheck> checks;
  DimensionOptions options;

  bool checks_pass() const;
};

DimensionReport report(const Census& census, const DimensionOptions& options,
                       const NevanlinnaFunction* f = nullptr);
DimensionReport report(const SyntheticLaw& law, const DimensionOptions& options);

/// Smallest j with c_mod j^(2/(m+2)) - 2 c_res j^(-m/(m+2)) / R > R.
long long synthetic_threshold(const SyntheticLaw& law, double R);

}  // namespace nevdim
