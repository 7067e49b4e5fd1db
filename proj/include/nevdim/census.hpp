#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nevdim/core_math.hpp"
#include "nevdim/nevanlinna.hpp"
#include "nevdim/ode.hpp"

namespace nevdim {

struct PoleRecord {
  int j = 0;  // rank by modulus, from 1
  cplx a;
  cplx b;  // residue
  double newton_residual = 0.0;
  int ray_label = 0;
};

/// Zero count of the denominator inside |z| < outer minus the count inside
/// |z| < inner, compared with the poles the search found there.
struct AnnulusCheck {
  double inner = 0.0;
  double outer = 0.0;
  int counted = 0;
  int found = 0;
  bool contour_ok = true;  // winding sums were close to integers
  bool complete() const { return contour_ok && counted == found; }
};

struct Census {
  std::string spec_name;
  int m = 0;
  double search_radius = 0.0;
  bool synthetic = false;
  std::vector<PoleRecord> records;
  std::vector<AnnulusCheck> annuli;
  /// Annuli where the found count deviates by more than 20% from the fitted
  /// counting function K r^rho (only set with enough records to fit).
  std::vector<double> fit_flagged_radii;
  /// Largest |f| seen on the sector bisectors of the outermost count circle:
  /// an estimate of the largest asymptotic value.
  double singular_radius = 0.0;
  /// Fundamental-pair states at the poles, parallel to records.
  std::vector<PairState> anchors;

  bool complete() const;
  std::size_t size() const { return records.size(); }
  /// Rank of the first record; synthetic censuses may start past 1.
  int first_index() const { return records.empty() ? 1 : records.front().j; }
  const PoleRecord& pole(int j) const;  // by rank
};

struct CensusOptions {
  int threads = 1;
  /// Tolerance for the zero-count contours; only the winding number is used.
  double count_tol = 1e-8;
  /// Smallest count circle; inside it one core disk is counted.
  double core_radius = 0.0;  // 0 selects a few local wavelengths
  int max_newton = 50;
};

/// Ray-guided pole search in |z| < rho with Newton polishing on the
/// denominator and zero counting on circles.
Census find_poles(const NevanlinnaFunction& f, double rho, const CensusOptions& options = {});

/// (1/2 pi i) \oint f dz on |z - a| = r by the trapezoid rule with 64 nodes,
/// checked against 128. Throws ContourInstability above 1e-8 relative.
cplx residue_at(const NevanlinnaFunction& f, cplx a, double r);

struct FitReport {
  double exponent = 0.0;
  double constant = 0.0;
  int j_min = 0;
  int j_max = 0;
  double rms = 0.0;
};

/// Least squares over the outer half of the census (>= 20 records).
FitReport fit_modulus_exponent(const Census& census);
FitReport fit_residue_exponent(const Census& census);
/// Slope of log n(r) against log r over the outer half of the census.
double counting_function_order(const Census& census);
/// log-log least-squares line through the given points.
FitReport fit_power_law(const std::vector<double>& x, const std::vector<double>& y, int j_min,
                        int j_max);

/// |a_j| = c'' j^{2/(m+2)}, arguments cycled over `rays`, b_j = c j^{-m/(m+2)}.
/// Records j_min..j_max only.
Census synthetic_census(int m, double c_mod, double c_res, int j_max, const std::vector<double>& rays,
                        int j_min = 1);
/// Rays 2 pi k/(m+2), the critical rays of z^m.
std::vector<double> default_rays(int m);

void write_census_csv(const Census& census, std::ostream& out);
/// Reads the CSV written above. m and the name come from the caller.
Census read_census_csv(std::istream& in, int m, const std::string& name);

inline constexpr const char* kCensusCsvHeader =
    "j,re_a,im_a,re_b,im_b,abs_a,abs_b,newton_residual,ray_label";

}  // namespace nevdim
