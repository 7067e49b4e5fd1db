#include "nevdim/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

namespace nevdim {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kRenormHigh = 1e64;
constexpr double kRenormLow = 1e-64;

// Solutions stored as (w, w') pairs: y[2k] = w_k, y[2k+1] = w_k'.
template <std::size_t N>
using Vec = std::array<cplx, N>;

template <std::size_t N>
Vec<N> rhs(const Polynomial& p, cplx z, cplx u, const Vec<N>& y) {
  const cplx pz = p(z);
  Vec<N> k;
  for (std::size_t i = 0; i < N; i += 2) {
    k[i] = u * y[i + 1];
    k[i + 1] = -u * pz * y[i];
  }
  return k;
}

template <std::size_t N>
double weighted_max(const Vec<N>& y, double sigma) {
  double m = 0.0;
  for (std::size_t i = 0; i < N; i += 2) {
    m = std::max(m, std::abs(y[i]) * sigma);
    m = std::max(m, std::abs(y[i + 1]));
  }
  return m;
}

template <std::size_t N>
double max_abs(const Vec<N>& y) {
  double m = 0.0;
  for (const cplx& v : y) m = std::max(m, std::abs(v));
  return m;
}

double step_cap(const Polynomial& p, cplx z) { return 0.5 / (1.0 + std::sqrt(std::abs(p(z)))); }

struct Progress {
  double log_scale = 0.0;
  double err = 0.0;
  double h = 0.0;  // step carried over between segments
};

// Integrates one straight segment. `accepted(z, y)` runs after every
// accepted step with the current (possibly renormalized) state.
template <std::size_t N, class Accepted>
void run_segment(const Polynomial& p, cplx za, cplx zb, Vec<N>& y, Progress& prog, double tol,
                 double min_step, bool renormalize, Accepted&& accepted) {
  const double len = std::abs(zb - za);
  if (len == 0.0) return;
  const cplx u = (zb - za) / len;
  double s = 0.0;
  double h = prog.h > 0.0 ? prog.h : step_cap(p, za);
  Vec<N> k1 = rhs<N>(p, za, u, y);
  while (s < len) {
    const cplx z = za + s * u;
    const double cap = step_cap(p, z);
    h = std::min(h, cap);
    bool last = false;
    if (h >= len - s) {
      h = len - s;
      last = true;
    }
    Vec<N> t;
    auto stage = [&](std::initializer_list<std::pair<double, const Vec<N>*>> terms) {
      for (std::size_t i = 0; i < N; ++i) {
        cplx acc = y[i];
        for (const auto& [coef, k] : terms) acc += h * coef * (*k)[i];
        t[i] = acc;
      }
      return t;
    };
    const Vec<N> k2 = rhs<N>(p, z + c2 * h * u, u, stage({{a21, &k1}}));
    const Vec<N> k3 = rhs<N>(p, z + c3 * h * u, u, stage({{a31, &k1}, {a32, &k2}}));
    const Vec<N> k4 = rhs<N>(p, z + c4 * h * u, u, stage({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const Vec<N> k5 =
        rhs<N>(p, z + c5 * h * u, u, stage({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const Vec<N> k6 = rhs<N>(p, z + h * u, u,
                             stage({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const Vec<N> y5 = stage({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const cplx znew = last ? zb : z + h * u;
    const Vec<N> k7 = rhs<N>(p, znew, u, y5);
    Vec<N> e;
    for (std::size_t i = 0; i < N; ++i) {
      e[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }
    const double sigma = 1.0 + std::sqrt(std::abs(p(z)));
    const double scale = std::max(weighted_max<N>(y, sigma), weighted_max<N>(y5, sigma));
    const double err = scale > 0.0 ? weighted_max<N>(e, sigma) / scale : 0.0;
    const double target = tol * h;
    if (err <= target) {
      s = last ? len : s + h;
      y = y5;
      k1 = k7;
      prog.err += err;
      if (renormalize) {
        const double m = max_abs<N>(y);
        if (m > kRenormHigh || (m > 0.0 && m < kRenormLow)) {
          for (auto& v : y) v /= m;
          for (auto& v : k1) v /= m;
          prog.log_scale += std::log(m);
        }
      }
      accepted(znew, y);
      const double fac = err == 0.0 ? 5.0 : 0.9 * std::pow(target / err, 0.25);
      if (!last) h *= std::clamp(fac, 0.2, 5.0);
    } else {
      h *= std::max(0.2, 0.9 * std::pow(target / err, 0.25));
      if (h < min_step) {
        throw Error(ErrorCode::StepUnderflow,
                    "step " + std::to_string(h) + " below " + std::to_string(min_step) +
                        " near z = (" + std::to_string(z.real()) + ", " +
                        std::to_string(z.imag()) + ")");
      }
    }
  }
  prog.h = h;
}

double polyline_length(std::span<const cplx> path) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) len += std::abs(path[i] - path[i - 1]);
  return len;
}

void check_tol(double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
}

}  // namespace

double PairState::norm() const {
  return std::max({std::abs(w1), std::abs(dw1), std::abs(w2), std::abs(dw2)});
}

double wronskian_drift(const PairState& s, cplx wronskian0) {
  const double denom = std::abs(s.w1 * s.dw2) + std::abs(s.w2 * s.dw1);
  const cplx expected = wronskian0 * std::exp(-2.0 * s.log_scale);
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(s.wronskian() - expected) / denom;
}

std::vector<ODEState> integrate(const Polynomial& p, std::span<const cplx> path, const ODEState& init,
                                double tol) {
  check_tol(tol);
  if (path.empty()) throw Error(ErrorCode::InvalidArgument, "empty path");
  if (path[0] != init.z) throw Error(ErrorCode::InvalidArgument, "path must start at init.z");
  const double total = polyline_length(path);
  std::vector<ODEState> out{init};
  Vec<2> y{init.w, init.dw};
  Progress prog;
  for (std::size_t i = 1; i < path.size(); ++i) {
    run_segment<2>(p, path[i - 1], path[i], y, prog, tol, 1e-14 * total, false,
                   [&](cplx z, const Vec<2>& v) { out.push_back({z, v[0], v[1]}); });
  }
  return out;
}

PairState propagate(const Polynomial& p, const PairState& start, std::span<const cplx> path,
                    const IntegratorOptions& options, const StepCallback& on_step) {
  check_tol(options.tol);
  if (path.empty()) throw Error(ErrorCode::InvalidArgument, "empty path");
  if (path[0] != start.z) throw Error(ErrorCode::InvalidArgument, "path must start at start.z");
  const double total = polyline_length(path);
  PairState cur = start;
  Vec<4> y{start.w1, start.dw1, start.w2, start.dw2};
  Progress prog{start.log_scale, start.err, 0.0};
  for (std::size_t i = 1; i < path.size(); ++i) {
    run_segment<4>(p, path[i - 1], path[i], y, prog, options.tol, 1e-14 * total, true,
                   [&](cplx z, const Vec<4>& v) {
                     cur = {z, v[0], v[1], v[2], v[3], prog.log_scale, prog.err};
                     if (options.monitor_drift) {
                       const double d = wronskian_drift(cur, options.wronskian0);
                       if (d > options.drift_tol) {
                         char msg[160];
                         std::snprintf(msg, sizeof msg, "normalized drift %.3e above %.1e at z = (%g, %g)", d,
                                       options.drift_tol, z.real(), z.imag());
                         throw Error(ErrorCode::WronskianDrift, msg);
                       }
                     }
                     if (on_step) on_step(cur);
                   });
  }
  return cur;
}

PairState propagate_to(const Polynomial& p, const PairState& start, cplx target,
                       const IntegratorOptions& options, const StepCallback& on_step) {
  const std::array<cplx, 2> path{start.z, target};
  return propagate(p, start, path, options, on_step);
}

PairState initial_pair(cplx z0) { return {z0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0}; }

FundamentalPair fundamental_pair(const Polynomial& p, cplx z0, std::span<const cplx> path, double tol) {
  FundamentalPair fp;
  fp.z0 = z0;
  fp.samples.push_back(initial_pair(z0));
  IntegratorOptions opt;
  opt.tol = tol;
  propagate(p, fp.samples.front(), path, opt, [&](const PairState& s) {
    fp.max_drift = std::max(fp.max_drift, wronskian_drift(s, fp.wronskian0));
    fp.samples.push_back(s);
  });
  return fp;
}

std::vector<double> critical_rays(const Polynomial& p) {
  if (p.is_zero()) throw Error(ErrorCode::InvalidArgument, "critical rays of the zero polynomial");
  const int m = p.degree();
  const double arg_a = std::arg(p.leading());
  std::vector<double> rays;
  for (int k = 0; k < m + 2; ++k) {
    double t = std::fmod((-arg_a + kTwoPi * k) / (m + 2), kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t -= kTwoPi;
    rays.push_back(t);
  }
  std::sort(rays.begin(), rays.end());
  return rays;
}

namespace {

cplx nearer(cplx candidate, cplx previous) {
  return std::abs(candidate - previous) <= std::abs(candidate + previous) ? candidate : -candidate;
}

}  // namespace

cplx liouville_Z(const Polynomial& p, std::span<const cplx> path, cplx seed) {
  const auto bs = sqrt_branch_along_path(p, path, seed);
  const GaussRule& g = gauss_legendre(8);
  cplx total = 0.0;
  for (std::size_t i = 1; i < bs.size(); ++i) {
    const cplx half = 0.5 * (bs[i].z - bs[i - 1].z);
    const cplx mid = 0.5 * (bs[i].z + bs[i - 1].z);
    cplx part = 0.0;
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
      const double x = g.nodes[k];
      const cplx guess = 0.5 * (1.0 - x) * bs[i - 1].root + 0.5 * (1.0 + x) * bs[i].root;
      part += g.weights[k] * nearer(std::sqrt(p(mid + x * half)), guess);
    }
    total += part * half;
  }
  return total;
}

cplx liouville_F(const Polynomial& p, cplx z) {
  const cplx pz = p(z);
  if (std::abs(pz) < zero_clearance(z)) {
    throw Error(ErrorCode::DivisionNearZero, "|p(z)| = " + std::to_string(std::abs(pz)));
  }
  const auto [d1, d2] = poly_derivatives(p);
  const cplx p1 = d1(z);
  const cplx p2 = d2(z);
  return p2 / (4.0 * pz * pz) - 5.0 * p1 * p1 / (16.0 * pz * pz * pz);
}

SectorSpec::SectorSpec(int m, double theta, double inner, double delta)
    : theta0(theta), delta_prime(delta), inner_radius(inner) {
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "degree must be non-negative");
  const double spacing = kTwoPi / (m + 2);
  if (delta_prime < 0.0) delta_prime = 0.1 * spacing;
  if (!(delta_prime > 0.0 && delta_prime < spacing)) {
    throw Error(ErrorCode::InvalidArgument, "sector margin must lie in (0, 2pi/(m+2))");
  }
  if (!(inner_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "inner radius must be positive");
  half_width_ = spacing - delta_prime;
}

bool SectorSpec::contains(cplx z) const {
  if (std::abs(z) <= inner_radius) return false;
  const double d = std::remainder(std::arg(z) - theta0, kTwoPi);
  return std::abs(d) < half_width_;
}

AsymptoticReport asymptotic_check(const Polynomial& p, const SectorSpec& sector,
                                  std::span<const double> ladder, double tol, const ODEState& init) {
  if (ladder.size() < 3) throw Error(ErrorCode::InvalidArgument, "ladder needs at least 3 radii");
  std::vector<double> radii(ladder.begin(), ladder.end());
  std::sort(radii.begin(), radii.end());
  if (radii.front() < sector.inner_radius) {
    throw Error(ErrorCode::PreconditionViolated, "ladder starts inside the sector's inner radius");
  }
  const int m = p.degree();
  const cplx dir = std::polar(1.0, sector.theta0);
  const cplx zs = sector.inner_radius * dir;

  // Branch of p^{1/2} along the ray, with ladder radii as vertices.
  std::vector<cplx> ray{zs};
  for (double r : radii) {
    if (r > sector.inner_radius) ray.push_back(r * dir);
  }
  const cplx root0 = std::sqrt(p(zs));
  const auto bs = sqrt_branch_along_path(p, ray, root0);

  // Integrate init -> zs -> ladder points, one state per ladder radius.
  PairState st{init.z, init.w, init.dw, 0.0, 0.0, 0.0, 0.0};
  IntegratorOptions opt;
  opt.tol = tol;
  opt.monitor_drift = false;
  if (init.z != zs) st = propagate_to(p, st, zs, opt);

  const auto [d1, d2] = poly_derivatives(p);
  (void)d2;
  AsymptoticReport rep;
  std::vector<cplx> log_alpha, log_beta;
  std::vector<double> mag_alpha, mag_beta;
  cplx Z = 2.0 * zs * root0 / static_cast<double>(m + 2);
  cplx quarter = std::sqrt(root0);
  std::size_t bi = 0;
  const GaussRule& g = gauss_legendre(8);
  for (double r : radii) {
    const cplx zr = r * dir;
    if (zr != st.z) st = propagate_to(p, st, zr, opt);
    // Advance Z and p^{1/4} along the branch samples up to zr.
    while (bi + 1 < bs.size() && std::abs(bs[bi].z) < r * (1.0 - 1e-15)) {
      const cplx half = 0.5 * (bs[bi + 1].z - bs[bi].z);
      const cplx mid = 0.5 * (bs[bi + 1].z + bs[bi].z);
      cplx part = 0.0;
      for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        const double x = g.nodes[k];
        const cplx guess = 0.5 * (1.0 - x) * bs[bi].root + 0.5 * (1.0 + x) * bs[bi + 1].root;
        part += g.weights[k] * nearer(std::sqrt(p(mid + x * half)), guess);
      }
      Z += part * half;
      ++bi;
      quarter = nearer(std::sqrt(bs[bi].root), quarter);
    }
    const cplx pz = p(zr);
    const cplx W = quarter * st.w1;
    const cplx dW = (st.dw1 + d1(zr) * st.w1 / (4.0 * pz)) / quarter;
    const cplx am = 0.5 * (W - cplx(0, 1) * dW);
    const cplx bm = 0.5 * (W + cplx(0, 1) * dW);
    const cplx iZ = cplx(0, 1) * Z;
    log_alpha.push_back(-iZ + st.log_scale + std::log(am));
    log_beta.push_back(iZ + st.log_scale + std::log(bm));
    mag_alpha.push_back(std::abs(am));
    mag_beta.push_back(std::abs(bm));
    rep.radii.push_back(r);
    rep.Z_abs.push_back(std::abs(Z));
    rep.F_constant = std::max(rep.F_constant, std::abs(liouville_F(p, zr)) * std::norm(Z));
  }

  const std::size_t n = radii.size();
  const double total = mag_alpha.back() + mag_beta.back();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto rel = [](cplx la, cplx lref) { return std::abs(std::exp(la - lref) - 1.0); };
  // A subdominant coefficient is buried under the O(1/Z) mixing of the
  // dominant one; it only counts as resolved if it is nearly constant.
  const bool keep_a = mag_alpha.back() >= 1e-6 * total && rel(log_alpha[n - 2], log_alpha.back()) <= 0.5;
  const bool keep_b = mag_beta.back() >= 1e-6 * total && rel(log_beta[n - 2], log_beta.back()) <= 0.5;
  for (std::size_t k = 0; k < n; ++k) {
    rep.eps1.push_back(keep_a ? rel(log_alpha[k], log_alpha.back()) : nan);
    rep.eps2.push_back(keep_b ? rel(log_beta[k], log_beta.back()) : nan);
  }
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double d = 0.0;
    if (keep_a) d = std::max(d, std::abs(std::exp(log_alpha[k] - log_alpha.back()) -
                                         std::exp(log_alpha[k + 1] - log_alpha.back())));
    if (keep_b) d = std::max(d, std::abs(std::exp(log_beta[k] - log_beta.back()) -
                                         std::exp(log_beta[k + 1] - log_beta.back())));
    if (d > 1e-11) {
      xs.push_back(0.5 * (std::log(rep.Z_abs[k]) + std::log(rep.Z_abs[k + 1])));
      ys.push_back(std::log(d));
    }
  }
  if (xs.size() >= 2) {
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    rep.decay_exponent = sxy / sxx;
  } else {
    rep.decay_exponent = nan;
  }
  return rep;
}

}  // namespace nevdim
