#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nevdim/core_math.hpp"

namespace nevdim {

/// Default local error tolerance per unit path length.
inline constexpr double kDefaultTol = 1e-12;
/// Largest admissible normalized Wronskian drift.
inline constexpr double kDriftTol = 1e-8;

struct ODEState {
  cplx z;
  cplx w;
  cplx dw;
};

/// Two solutions carried together. Stored values are scaled by
/// exp(-log_scale) so that exponentially growing solutions stay in range;
/// the true values are w * exp(log_scale). `err` accumulates the local error
/// estimates relative to max|y| along the path travelled so far.
struct PairState {
  cplx z;
  cplx w1, dw1;
  cplx w2, dw2;
  double log_scale = 0.0;
  double err = 0.0;

  double norm() const;
  /// Wronskian of the stored (scaled) values.
  cplx wronskian() const { return w1 * dw2 - w2 * dw1; }
};

struct IntegratorOptions {
  double tol = kDefaultTol;
  double drift_tol = kDriftTol;
  /// Wronskian of the true values, used by the drift monitor.
  cplx wronskian0 = 1.0;
  bool monitor_drift = true;
};

/// |W - W0 e^{-2 log_scale}| / (|w1 w2'| + |w2 w1'|): the Wronskian defect
/// measured against the size of the terms that cancel in it.
double wronskian_drift(const PairState& s, cplx wronskian0);

/// Dormand-Prince 5(4) on (w, w')' = (w', -p w) along a polyline.
/// Returns the state at every accepted step, starting with `init`.
/// Throws StepUnderflow when the step drops below 1e-14 of the path length.
std::vector<ODEState> integrate(const Polynomial& p, std::span<const cplx> path, const ODEState& init,
                                double tol = kDefaultTol);

using StepCallback = std::function<void(const PairState&)>;

/// Advances a pair along the polyline path (path[0] must equal start.z).
/// `on_step` sees every accepted step. Throws WronskianDrift when the
/// monitored drift exceeds options.drift_tol.
PairState propagate(const Polynomial& p, const PairState& start, std::span<const cplx> path,
                    const IntegratorOptions& options = {}, const StepCallback& on_step = {});
/// Straight segment from start.z to target.
PairState propagate_to(const Polynomial& p, const PairState& start, cplx target,
                       const IntegratorOptions& options = {}, const StepCallback& on_step = {});

struct FundamentalPair {
  cplx z0;
  cplx wronskian0 = 1.0;
  std::vector<PairState> samples;
  double max_drift = 0.0;

  const PairState& back() const { return samples.back(); }
};

/// Pair with data (1, 0) and (0, 1) at z0, integrated along `path`.
FundamentalPair fundamental_pair(const Polynomial& p, cplx z0, std::span<const cplx> path,
                                 double tol = kDefaultTol);
PairState initial_pair(cplx z0);

/// The m+2 angles in [0, 2pi) with arg a_m + (m+2) theta = 0 mod 2pi, ascending.
std::vector<double> critical_rays(const Polynomial& p);

/// Integral of p^{1/2} along the path with the branch continued from `seed`.
cplx liouville_Z(const Polynomial& p, std::span<const cplx> path, cplx seed);
/// F = p''/(4p^2) - 5p'^2/(16p^3). Throws DivisionNearZero near zeros of p.
cplx liouville_F(const Polynomial& p, cplx z);

struct SectorSpec {
  double theta0;
  double delta_prime;
  double inner_radius;

  /// delta' defaults to a tenth of the ray spacing 2pi/(m+2).
  SectorSpec(int m, double theta, double inner, double delta = -1.0);
  double half_width() const { return half_width_; }
  bool contains(cplx z) const;

 private:
  double half_width_;
};

struct AsymptoticReport {
  std::vector<double> radii;
  std::vector<double> Z_abs;
  /// Relative drift of the e^{iZ} and e^{-iZ} coefficients against the
  /// outermost radius. NaN where the coefficient is too small to resolve.
  std::vector<double> eps1;
  std::vector<double> eps2;
  /// Slope of log(coefficient change between consecutive radii) against
  /// log|Z|. Differences between neighbours remove the bias that a finite
  /// reference radius puts into eps itself.
  double decay_exponent = 0.0;
  /// max |F| |Z|^2 over the ladder.
  double F_constant = 0.0;
};

/// Integrates from init along the ray arg z = theta0 and compares the local
/// Liouville coefficients of W = p^{1/4} w on the radius ladder.
AsymptoticReport asymptotic_check(const Polynomial& p, const SectorSpec& sector,
                                  std::span<const double> ladder, double tol = kDefaultTol,
                                  const ODEState& init = {0.0, 1.0, 0.0});

}  // namespace nevdim
