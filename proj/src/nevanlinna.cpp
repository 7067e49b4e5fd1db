#include "nevdim/nevanlinna.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "nevdim/census.hpp"

namespace nevdim {

void NevanlinnaSpec::validate() const {
  if (p.is_zero()) throw Error(ErrorCode::InvalidArgument, "p must be a nonzero polynomial");
  if (M.c() == cplx{0.0}) {
    throw Error(ErrorCode::InvalidArgument, "z0 is a pole: the denominator equals c there");
  }
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
}

NevanlinnaSpec NevanlinnaSpec::tan(cplx lambda) {
  NevanlinnaSpec s;
  s.name = lambda == cplx{1.0} ? "tan" : "lambda_tan";
  s.p = Polynomial::constant(1.0);
  s.M = MoebiusMap(0.0, lambda, 1.0, 0.0);
  return s;
}

NevanlinnaSpec NevanlinnaSpec::airy() {
  NevanlinnaSpec s;
  s.name = "airy";
  s.p = Polynomial::monomial(1);
  return s;
}

NevanlinnaSpec NevanlinnaSpec::weber() {
  NevanlinnaSpec s;
  s.name = "weber";
  s.p = Polynomial::monomial(2);
  return s;
}

NevanlinnaSpec NevanlinnaSpec::exp_like() {
  // w1 = cosh(z/2), w2 = 2 sinh(z/2): w1 + w2/2 = e^{z/2}, w1 - w2/2 = e^{-z/2}.
  NevanlinnaSpec s;
  s.name = "exp_like";
  s.p = Polynomial::constant(-0.25);
  s.M = MoebiusMap(1.0, 0.5, 1.0, -0.5);
  return s;
}

// ---------------------------------------------------------------------------

NevanlinnaFunction::NevanlinnaFunction(NevanlinnaSpec spec, EvalOptions options)
    : spec_(std::move(spec)), options_(options) {
  spec_.validate();
  anchors_.push_back(initial_pair(spec_.z0));
}

void NevanlinnaFunction::add_anchor(const PairState& s) {
  auto it = std::lower_bound(anchors_.begin(), anchors_.end(), s.z.real(),
                             [](const PairState& a, double x) { return a.z.real() < x; });
  anchors_.insert(it, s);
}

void NevanlinnaFunction::add_anchors(const std::vector<PairState>& states) {
  anchors_.insert(anchors_.end(), states.begin(), states.end());
  std::stable_sort(anchors_.begin(), anchors_.end(),
                   [](const PairState& a, const PairState& b) { return a.z.real() < b.z.real(); });
}

const PairState& NevanlinnaFunction::nearest_anchor(cplx z) const {
  auto it = std::lower_bound(anchors_.begin(), anchors_.end(), z.real(),
                             [](const PairState& a, double x) { return a.z.real() < x; });
  const PairState* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (auto r = it; r != anchors_.end(); ++r) {
    if (r->z.real() - z.real() > best_d) break;
    const double d = std::abs(r->z - z);
    if (d < best_d) best_d = d, best = &*r;
  }
  for (auto l = it; l != anchors_.begin();) {
    --l;
    if (z.real() - l->z.real() > best_d) break;
    const double d = std::abs(l->z - z);
    if (d < best_d) best_d = d, best = &*l;
  }
  return *best;
}

PairState NevanlinnaFunction::state_from(const PairState& from, cplx z) const {
  if (from.z == z) return from;
  IntegratorOptions opt;
  opt.tol = spec_.tol;
  return propagate_to(spec_.p, from, z, opt);
}

PairState NevanlinnaFunction::state_at(cplx z) const {
  const PairState& a = nearest_anchor(z);
  const double dist = std::abs(a.z - z);
  if (dist > options_.max_path_length) {
    throw Error(ErrorCode::AccuracyBudgetExceeded,
                "nearest anchor is " + std::to_string(dist) + " away (budget " +
                    std::to_string(options_.max_path_length) + ")");
  }
  return state_from(a, z);
}

cplx NevanlinnaFunction::numerator(const PairState& s) const {
  return spec_.M.a() * s.w1 + spec_.M.b() * s.w2;
}
cplx NevanlinnaFunction::denominator(const PairState& s) const {
  return spec_.M.c() * s.w1 + spec_.M.d() * s.w2;
}
cplx NevanlinnaFunction::numerator_derivative(const PairState& s) const {
  return spec_.M.a() * s.dw1 + spec_.M.b() * s.dw2;
}
cplx NevanlinnaFunction::denominator_derivative(const PairState& s) const {
  return spec_.M.c() * s.dw1 + spec_.M.d() * s.dw2;
}

SpherePoint NevanlinnaFunction::value(const PairState& s) const {
  const cplx n = numerator(s);
  const cplx d = denominator(s);
  if (std::abs(d) < 1e-13 * std::abs(n) || d == cplx{0.0}) return SpherePoint::infinity();
  return n / d;
}

cplx NevanlinnaFunction::derivative(const PairState& s) const {
  const cplx d = denominator(s);
  return -spec_.M.determinant() * s.wronskian() / (d * d);
}

double NevanlinnaFunction::relative_error_estimate(const PairState& s) const {
  const double abs_err = std::max(s.err, std::numeric_limits<double>::epsilon()) * s.norm();
  const double n = std::abs(numerator(s));
  const double d = std::abs(denominator(s));
  const double en = (std::abs(spec_.M.a()) + std::abs(spec_.M.b())) * abs_err;
  const double ed = (std::abs(spec_.M.c()) + std::abs(spec_.M.d())) * abs_err;
  if (n == 0.0 || d == 0.0) return std::numeric_limits<double>::infinity();
  return en / n + ed / d;
}

SpherePoint evaluate(const NevanlinnaSpec& spec, cplx z) {
  spec.validate();
  IntegratorOptions opt;
  opt.tol = spec.tol;
  const PairState s = propagate_to(spec.p, initial_pair(spec.z0), z, opt);
  const cplx n = spec.M.a() * s.w1 + spec.M.b() * s.w2;
  const cplx d = spec.M.c() * s.w1 + spec.M.d() * s.w2;
  if (std::abs(d) < 1e-13 * std::abs(n) || d == cplx{0.0}) return SpherePoint::infinity();
  return n / d;
}

// ---------------------------------------------------------------------------

cplx grid_point(const Window& w, int nx, int ny, int ix, int iy) {
  const double x = w.x_min + (ix + 0.5) * (w.x_max - w.x_min) / nx;
  const double y = w.y_max - (iy + 0.5) * (w.y_max - w.y_min) / ny;
  return {x, y};
}

Grid evaluate_grid(const NevanlinnaFunction& f, const Window& window, int nx, int ny, int threads) {
  if (nx < 1 || ny < 1) throw Error(ErrorCode::InvalidArgument, "grid needs nx, ny >= 1");
  Grid g;
  g.nx = nx;
  g.ny = ny;
  g.cells.resize(static_cast<std::size_t>(nx) * ny);
  auto column = [&](int ix) {
    bool have = false;
    PairState s;
    for (int iy = 0; iy < ny; ++iy) {
      GridCell& cell = g.cells[static_cast<std::size_t>(iy * nx + ix)];
      const cplx z = grid_point(window, nx, ny, ix, iy);
      try {
        s = have ? f.state_from(s, z) : f.state_at(z);
        have = true;
        cell.value = f.value(s);
      } catch (const Error& e) {
        cell.ok = false;
        cell.error = e.code();
        have = false;
      }
    }
  };
  const int nt = std::clamp(threads, 1, nx);
  if (nt == 1) {
    for (int ix = 0; ix < nx; ++ix) column(ix);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) {
      pool.emplace_back([&, t] {
        for (int ix = t; ix < nx; ix += nt) column(ix);
      });
    }
    for (auto& th : pool) th.join();
  }
  return g;
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kStencil = 16;

cplx schwarzian_at(const NevanlinnaFunction& f, const PairState& centre, double h) {
  cplx d1 = 0.0, d2 = 0.0, d3 = 0.0;
  for (int n = 0; n < kStencil; ++n) {
    const double th = kTwoPi * n / kStencil;
    const cplx e = std::polar(1.0, th);
    const PairState s = f.state_from(centre, centre.z + h * e);
    const SpherePoint v = f.value(s);
    if (v.is_infinity() || std::abs(v.value()) > 1.0 / h) {
      throw Error(ErrorCode::StencilNearPole,
                  "|f| exceeds 1/h on the stencil around (" + std::to_string(centre.z.real()) +
                      ", " + std::to_string(centre.z.imag()) + ")");
    }
    const cplx fv = v.value();
    d1 += fv / e;
    d2 += fv / (e * e);
    d3 += fv / (e * e * e);
  }
  d1 *= 1.0 / (kStencil * h);
  d2 *= 2.0 / (kStencil * h * h);
  d3 *= 6.0 / (kStencil * h * h * h);
  const cplx q = d2 / d1;
  return d3 / d1 - 1.5 * q * q;
}

}  // namespace

SchwarzianReport schwarzian_residual(const NevanlinnaFunction& f, const std::vector<cplx>& samples,
                                     double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "stencil step must be positive");
  SchwarzianReport rep;
  rep.samples = samples;
  rep.h = h;
  for (const cplx z : samples) {
    const PairState centre = f.state_at(z);
    const cplx s1 = schwarzian_at(f, centre, h);
    const cplx s2 = schwarzian_at(f, centre, 0.5 * h);
    const double r = std::abs(s1 - 2.0 * f.p()(z));
    rep.residuals.push_back(r);
    rep.richardson_gap.push_back(std::abs(s1 - s2));
    rep.max_residual = std::max(rep.max_residual, r);
  }
  return rep;
}

// ---------------------------------------------------------------------------

std::string_view to_string(OrbitClass c) {
  switch (c) {
    case OrbitClass::Stayed: return "stayed";
    case OrbitClass::Dropped: return "dropped";
    case OrbitClass::HitPole: return "hit-pole";
    case OrbitClass::Undefined: return "undefined";
  }
  return "unknown";
}

OrbitRecord iterate(const NevanlinnaFunction& f, cplx z, int N, double R) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "iteration count must be >= 1");
  if (!(R > 0.0)) throw Error(ErrorCode::InvalidArgument, "R must be positive");
  OrbitRecord rec;
  rec.start = z;
  if (!(std::abs(z) > R)) {
    rec.classification = OrbitClass::Dropped;
    rec.step = 0;
    return rec;
  }
  cplx cur = z;
  for (int n = 1; n <= N; ++n) {
    try {
      const PairState s = f.state_at(cur);
      const SpherePoint v = f.value(s);
      rec.iterates.push_back(v);
      if (v.is_infinity()) {
        rec.classification = OrbitClass::HitPole;
        rec.step = n;
        return rec;
      }
      rec.relative_error = std::max(rec.relative_error, f.relative_error_estimate(s));
      if (rec.relative_error > kOrbitErrorBudget) {
        rec.classification = OrbitClass::Undefined;
        rec.step = n;
        return rec;
      }
      cur = v.value();
    } catch (const Error&) {
      rec.classification = OrbitClass::Undefined;
      rec.step = n;
      return rec;
    }
    if (!(std::abs(cur) > R)) {
      rec.classification = OrbitClass::Dropped;
      rec.step = n;
      return rec;
    }
  }
  rec.classification = OrbitClass::Stayed;
  rec.step = N;
  return rec;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ScreenVerdict v) {
  switch (v) {
    case ScreenVerdict::Consistent: return "consistent";
    case ScreenVerdict::Evidence: return "evidence";
    case ScreenVerdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

ScreenReport infinity_asymptotic_screen(const NevanlinnaFunction& f, double R, const Census& census,
                                        int max_poles) {
  ScreenReport rep;
  if (!(R < census.search_radius)) {
    rep.findings.push_back("census radius " + std::to_string(census.search_radius) +
                           " does not exceed R");
    return rep;
  }
  if (census.records.empty()) {
    rep.verdict = ScreenVerdict::Evidence;
    rep.findings.push_back("no poles in |z| < " + std::to_string(census.search_radius) +
                           " although the counting law n(r) ~ K r^" +
                           std::to_string((census.m + 2) / 2.0) + " predicts infinitely many");
    return rep;
  }
  constexpr int kOuter = 32;
  constexpr int kWinding = 32;
  bool violation = false;
  for (const PoleRecord& rec : census.records) {
    if (rep.poles_checked >= max_poles) break;
    const double rb = std::abs(rec.b);
    if (!(std::abs(rec.a) - 2.0 * rb / R > R)) continue;
    ++rep.poles_checked;
    const double outer = 2.0 * rb / R;
    double worst = 0.0;
    for (int k = 0; k < kOuter; ++k) {
      const SpherePoint v = f.value(rec.a + std::polar(outer, kTwoPi * k / kOuter));
      worst = std::max(worst, v.modulus());
    }
    if (!(worst <= R)) {
      violation = true;
      rep.findings.push_back("pole " + std::to_string(rec.j) + ": max |f| = " +
                             std::to_string(worst) + " on the outer Koebe circle");
    }
    // Winding number of 1/f around 0 on a small circle.
    const double small = rb / (10.0 * R);
    double turn = 0.0;
    cplx prev = 0.0;
    for (int k = 0; k <= kWinding; ++k) {
      const SpherePoint v = f.value(rec.a + std::polar(small, kTwoPi * k / kWinding));
      const cplx inv = v.is_infinity() ? cplx{0.0} : 1.0 / v.value();
      if (k > 0) turn += std::arg(inv / prev);
      prev = inv;
    }
    const long winding = std::lround(turn / kTwoPi);
    if (winding != 1) {
      violation = true;
      rep.findings.push_back("pole " + std::to_string(rec.j) + ": winding number of 1/f is " +
                             std::to_string(winding));
    }
  }
  if (rep.poles_checked == 0) {
    rep.findings.push_back("no censused pole lies outside B(R) with its outer disk");
    return rep;
  }
  rep.verdict = violation ? ScreenVerdict::Evidence : ScreenVerdict::Consistent;
  return rep;
}

}  // namespace nevdim
