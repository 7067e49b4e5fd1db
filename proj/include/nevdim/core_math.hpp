#pragma once

#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nevdim/error.hpp"

namespace nevdim {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Complex polynomial with coefficients stored constant term first.
///
/// Trailing zero coefficients are trimmed on construction, so degree() is the
/// index of the last nonzero coefficient. The zero polynomial is representable
/// (it appears as the derivative of a constant) and reports degree 0 with
/// is_zero() true; it is the only value whose leading coefficient is zero.
class Polynomial {
 public:
  Polynomial() : coeffs_{cplx{0.0}} {}
  explicit Polynomial(std::vector<cplx> coeffs);

  static Polynomial constant(cplx c) { return Polynomial({c}); }
  static Polynomial monomial(int degree, cplx coefficient = 1.0);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == cplx{0.0}; }
  cplx leading() const { return coeffs_.back(); }
  std::span<const cplx> coeffs() const { return coeffs_; }

  cplx operator()(cplx z) const;
  Polynomial derivative() const;

  bool operator==(const Polynomial&) const = default;

 private:
  std::vector<cplx> coeffs_;
};

cplx poly_eval(const Polynomial& p, cplx z);
/// (p', p'') by exact coefficient shifts.
std::pair<Polynomial, Polynomial> poly_derivatives(const Polynomial& p);

/// A point of the Riemann sphere: either finite or the point at infinity.
class SpherePoint {
 public:
  SpherePoint(cplx z) : value_(z) {}  // NOLINT: implicit from finite values
  static SpherePoint infinity() { return SpherePoint(); }

  bool is_infinity() const { return !value_.has_value(); }
  cplx value() const;
  /// |z|, or +inf at infinity.
  double modulus() const;

  bool operator==(const SpherePoint&) const = default;

 private:
  SpherePoint() = default;
  std::optional<cplx> value_;
};

/// z -> (a z + b) / (c z + d) with ad - bc != 0.
class MoebiusMap {
 public:
  MoebiusMap(cplx a, cplx b, cplx c, cplx d);
  static MoebiusMap identity() { return {1.0, 0.0, 0.0, 1.0}; }

  cplx a() const { return a_; }
  cplx b() const { return b_; }
  cplx c() const { return c_; }
  cplx d() const { return d_; }
  cplx determinant() const { return a_ * d_ - b_ * c_; }

  MoebiusMap inverse() const { return {d_, -b_, -c_, a_}; }
  /// (*this) after `inner`.
  MoebiusMap compose(const MoebiusMap& inner) const;

  bool operator==(const MoebiusMap&) const = default;

 private:
  cplx a_, b_, c_, d_;
};

SpherePoint moebius_apply(const MoebiusMap& m, const SpherePoint& g);

/// Chordal distance on the unit sphere (diameter 2).
double chordal_distance(const SpherePoint& z, const SpherePoint& w);

struct Disk {
  cplx center;
  double radius;

  Disk(cplx c, double r);
  bool contains(cplx z) const { return std::abs(z - center) < radius; }
};

/// A(s) = {s < |z| < 2s}.
struct Annulus {
  double inner;

  explicit Annulus(double s);
  double outer() const { return 2.0 * inner; }
  bool contains(cplx z) const {
    const double r = std::abs(z);
    return r > inner && r < outer();
  }
  bool contains(const Disk& d) const {
    const double r = std::abs(d.center);
    return r - d.radius >= inner && r + d.radius <= outer();
  }
};

/// Spherical area of a Euclidean disk: the integral of 4/(1+|z|^2)^2 over it,
/// by polar quadrature about the disk centre. Whole sphere is 4*pi.
double spherical_area(const Disk& disk);
/// Spherical area of {s < |z| < 2s} from the closed form for centred disks.
double spherical_area(const Annulus& annulus);

struct BranchSample {
  cplx z;
  cplx root;  // continuous branch of p(z)^{1/2}
};

/// Clearance from the zeros of p used by branch tracking: 1e-6 (1 + |z|).
inline double zero_clearance(cplx z) { return 1e-6 * (1.0 + std::abs(z)); }

/// Continues p^{1/2} along a polyline from `seed` (seed^2 = p(path[0])).
/// Segments are subdivided until successive roots differ by less than 0.1 rad
/// in argument. Throws ZeroClearanceViolated when |p| < zero_clearance on a
/// sample.
std::vector<BranchSample> sqrt_branch_along_path(const Polynomial& p, std::span<const cplx> path,
                                                 cplx seed);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

}  // namespace nevdim
