#pragma once

#include <string>
#include <vector>

#include "nevdim/census.hpp"
#include "nevdim/core_math.hpp"
#include "nevdim/nevanlinna.hpp"

namespace nevdim {

inline constexpr double kDefaultC = 12.0;
/// Chordal metric on the unit sphere: diam_chi <= (C1/|a|^2) diam near a.
inline constexpr double kDefaultC1 = 4.0;

struct BranchInfo {
  int j = 0;
  double R = 0.0;
  cplx a;
  cplx b;
  Disk inner{0.0, 1.0};  // D(a_j, |b_j|/(4R))
  Disk outer{0.0, 1.0};  // D(a_j, 2|b_j|/R)
  double diam_bound = 0.0;
  bool contained_in_BR = false;  // |a_j| - 2|b_j|/R > R

  /// |g_j'(z)| <= 12 |b_j| / |z|^2.
  double derivative_bound(cplx z) const { return 12.0 * std::abs(b) / std::norm(z); }
};

BranchInfo branch_info(const Census& census, int j, double R);

/// M(R): 1 + the largest j whose outer disk is not contained in |z| > R.
/// Every j >= M(R) in the census is admissible.
int admissibility_threshold(const Census& census, double R);
bool is_admissible(const Census& census, int j, double R);

struct CheckReport {
  int pole_index = 0;
  double R = 0.0;
  std::string status = "pass";  // pass, fail, not-applicable
  bool pass = true;
  double worst_margin = 0.0;
  int samples = 0;
  std::vector<std::string> failures;
};

/// |f| > R on the inner disk (boundary and a concentric circle of half the
/// radius) and |f| <= R on the outer circle. Not applicable when R does not
/// exceed the census's singular radius.
CheckReport koebe_sandwich_check(const NevanlinnaFunction& f, const Census& census,
                                 const BranchInfo& info, int n_samples);

struct InverseResult {
  cplx z;
  cplx derivative;  // g_j'(w) = 1 / f'(z)
  int iterations = 0;
};

/// Solves f(z) = w in U_j by Newton on D/N - 1/w from the seed a_j + b_j/w.
/// w = infinity returns the pole itself.
InverseResult newton_inverse(const NevanlinnaFunction& f, const Census& census, int j,
                             const SpherePoint& w, double R);

struct CylinderEstimate {
  std::vector<int> code;
  double euclid_diam_bound = 0.0;
  double sphere_diam_bound = 0.0;
  double C = kDefaultC;
  double C1 = kDefaultC1;
};

CylinderEstimate cylinder_diameter(const Census& census, const std::vector<int>& code, double R,
                                   double C = kDefaultC, double C1 = kDefaultC1);

/// Children g_{j1..j(l-1)}(outer circle of j_l) must lie inside the parent
/// curve g_{j1..j(l-2)}(outer circle of j_(l-1)). Depth 1 passes vacuously.
CheckReport verify_nesting(const NevanlinnaFunction& f, const Census& census, const std::vector<int>& code,
                           double R, int samples);

/// Max pairwise distance of g_{j1} o ... o g_{jl} applied to samples of the
/// circle |w| = R, which bounds the cylinder. Depth at most 3.
double empirical_cylinder_diameter(const NevanlinnaFunction& f, const Census& census,
                                   const std::vector<int>& code, double R, int samples);

double euclidean_diameter(const std::vector<cplx>& pts);
double spherical_diameter(const std::vector<cplx>& pts);

/// levels[l-1] holds one disk per code of length l over `symbols`: centre the
/// pulled-back pole g_{j1..j(l-1)}(a_{jl}), radius (2|b_{jl}|/R) times the
/// derivative of the composed branches there.
struct CylinderCover {
  std::vector<std::vector<Disk>> levels;
};
CylinderCover cylinder_cover(const NevanlinnaFunction& f, const Census& census, double R, int depth,
                             const std::vector<int>& symbols);

}  // namespace nevdim
