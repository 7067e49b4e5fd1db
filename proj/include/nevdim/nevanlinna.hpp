#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nevdim/core_math.hpp"
#include "nevdim/ode.hpp"

namespace nevdim {

/// f = (a w1 + b w2) / (c w1 + d w2) where (w1, w2) is the fundamental pair
/// of w'' + p w = 0 at z0. Then S_f = 2p.
struct NevanlinnaSpec {
  std::string name = "custom";
  Polynomial p = Polynomial::constant(1.0);
  MoebiusMap M = MoebiusMap(0.0, 1.0, 1.0, 0.0);
  cplx z0 = 0.0;
  double tol = kDefaultTol;

  int degree() const { return p.degree(); }
  /// Throws InvalidArgument if z0 is a pole (the denominator there is c).
  void validate() const;

  static NevanlinnaSpec tan(cplx lambda = 1.0);
  static NevanlinnaSpec airy();
  static NevanlinnaSpec weber();
  /// p = -1/4 with data giving exactly exp(z).
  static NevanlinnaSpec exp_like();
};

struct EvalOptions {
  /// Longest path from an anchor that an evaluation may integrate.
  double max_path_length = 4000.0;
};

/// Evaluator carrying anchor states (integrated fundamental-pair values at
/// known points) so that evaluations start from the nearest anchor.
class NevanlinnaFunction {
 public:
  explicit NevanlinnaFunction(NevanlinnaSpec spec, EvalOptions options = {});

  const NevanlinnaSpec& spec() const { return spec_; }
  const Polynomial& p() const { return spec_.p; }
  const EvalOptions& options() const { return options_; }

  void add_anchor(const PairState& s);
  void add_anchors(const std::vector<PairState>& states);
  std::size_t anchor_count() const { return anchors_.size(); }
  const PairState& nearest_anchor(cplx z) const;

  /// State at z integrated from the nearest anchor. Throws
  /// AccuracyBudgetExceeded when that anchor is further than max_path_length.
  PairState state_at(cplx z) const;
  PairState state_from(const PairState& from, cplx z) const;

  cplx numerator(const PairState& s) const;
  cplx denominator(const PairState& s) const;
  cplx denominator_derivative(const PairState& s) const;
  cplx numerator_derivative(const PairState& s) const;

  /// infinity when |D| < 1e-13 |N|.
  SpherePoint value(const PairState& s) const;
  SpherePoint value(cplx z) const { return value(state_at(z)); }
  /// f' = -det(M) W / D^2 (scale factors cancel).
  cplx derivative(const PairState& s) const;
  cplx derivative(cplx z) const { return derivative(state_at(z)); }
  /// First-order bound on the relative error of f from the accumulated
  /// integration error.
  double relative_error_estimate(const PairState& s) const;

 private:
  NevanlinnaSpec spec_;
  EvalOptions options_;
  std::vector<PairState> anchors_;  // sorted by real part
};

/// Straight-segment evaluation from z0.
SpherePoint evaluate(const NevanlinnaSpec& spec, cplx z);

struct Window {
  double x_min, x_max, y_min, y_max;
};

struct GridCell {
  SpherePoint value = SpherePoint::infinity();
  bool ok = true;
  ErrorCode error = ErrorCode::InvalidArgument;
};

struct Grid {
  int nx = 0, ny = 0;
  std::vector<GridCell> cells;  // row-major, row 0 at y_max
  const GridCell& at(int ix, int iy) const { return cells[static_cast<std::size_t>(iy * nx + ix)]; }
};

/// Pixel-centre coordinates of the grid.
cplx grid_point(const Window& w, int nx, int ny, int ix, int iy);

/// Evaluations at pixel centres. Each column is integrated top to bottom
/// from the nearest anchor of its first pixel; columns are split over threads.
Grid evaluate_grid(const NevanlinnaFunction& f, const Window& window, int nx, int ny, int threads = 1);

struct SchwarzianReport {
  std::vector<cplx> samples;
  std::vector<double> residuals;       // |S_f - 2p| at step h
  std::vector<double> richardson_gap;  // |S_f(h) - S_f(h/2)|
  double max_residual = 0.0;
  double h = 0.0;
};

/// Derivatives from a 16-point Cauchy trapezoid stencil on |zeta - z| = h,
/// each stencil value integrated from the centre state.
/// Throws StencilNearPole if |f| > 1/h on a stencil point.
SchwarzianReport schwarzian_residual(const NevanlinnaFunction& f, const std::vector<cplx>& samples,
                                     double h);

enum class OrbitClass { Stayed, Dropped, HitPole, Undefined };
std::string_view to_string(OrbitClass c);

struct OrbitRecord {
  cplx start;
  std::vector<SpherePoint> iterates;  // f^1(z), f^2(z), ...
  OrbitClass classification = OrbitClass::Stayed;
  int step = 0;  // step at which the orbit dropped / hit a pole / left the budget
  double relative_error = 0.0;
};

inline constexpr double kOrbitErrorBudget = 1e-6;

/// Classifies the orbit of z against |f^n| > R for n <= N.
OrbitRecord iterate(const NevanlinnaFunction& f, cplx z, int N, double R);

struct Census;

enum class ScreenVerdict { Consistent, Evidence, Inconclusive };
std::string_view to_string(ScreenVerdict v);

struct ScreenReport {
  ScreenVerdict verdict = ScreenVerdict::Inconclusive;
  int poles_checked = 0;
  std::vector<std::string> findings;
};

/// Looks for evidence that infinity is an asymptotic value: a pole whose
/// outer Koebe circle does not satisfy |f| <= R, a pole that is not simple,
/// or an empty census where the counting law requires poles.
ScreenReport infinity_asymptotic_screen(const NevanlinnaFunction& f, double R, const Census& census,
                                        int max_poles = 256);

}  // namespace nevdim
