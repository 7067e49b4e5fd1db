#include "nevdim/census.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

namespace nevdim {

bool Census::complete() const {
  return fit_flagged_radii.empty() &&
         std::all_of(annuli.begin(), annuli.end(), [](const AnnulusCheck& a) { return a.complete(); });
}

const PoleRecord& Census::pole(int j) const {
  const int first = first_index();
  if (j < first || static_cast<std::size_t>(j - first) >= records.size()) {
    throw Error(ErrorCode::InvalidArgument, "pole index " + std::to_string(j) + " out of range");
  }
  return records[static_cast<std::size_t>(j - first)];
}

namespace {

template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  const int nt = std::clamp(threads, 1, std::max(n, 1));
  if (nt == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

double local_wavenumber(const Polynomial& p, cplx z) { return std::sqrt(std::abs(p(z))); }

struct Candidate {
  cplx a;
  cplx b;
  double residual;
  PairState state;
};

double angle_distance(double x, double y) { return std::abs(std::remainder(x - y, kTwoPi)); }

int nearest_ray(const std::vector<double>& rays, cplx a) {
  const double t = std::arg(a);
  int best = 0;
  for (int k = 1; k < static_cast<int>(rays.size()); ++k) {
    if (angle_distance(t, rays[k]) < angle_distance(t, rays[best])) best = k;
  }
  return best;
}

double newton_tolerance(cplx a) { return 1e-10 * (1.0 + std::abs(a)); }

// Newton on the denominator from a nearby state.
bool polish(const NevanlinnaFunction& f, PairState s, int max_iter, Candidate& out) {
  const Polynomial& p = f.p();
  for (int it = 0; it < max_iter; ++it) {
    const cplx d = f.denominator(s);
    const cplx dd = f.denominator_derivative(s);
    if (dd == cplx{0.0}) return false;
    cplx dz = -d / dd;
    const double cap = kPi / (1.0 + local_wavenumber(p, s.z));
    if (std::abs(dz) > cap) dz *= cap / std::abs(dz);
    const bool small = std::abs(dz) <= newton_tolerance(s.z);
    s = f.state_from(s, s.z + dz);
    if (small) break;
  }
  const cplx d = f.denominator(s);
  const cplx dd = f.denominator_derivative(s);
  if (dd == cplx{0.0}) return false;
  const double residual = std::abs(d / dd);
  if (!(residual <= newton_tolerance(s.z))) return false;
  out = {s.z, f.numerator(s) / dd, residual, s};
  return true;
}

// Streams the march along a ray and keeps local minima of |D| / |state|.
struct RayMarch {
  std::vector<PairState> seeds;
  std::vector<PairState> checkpoints;
};

RayMarch march_ray(const NevanlinnaFunction& f, double theta, double r_end, double checkpoint_step) {
  RayMarch out;
  const cplx dir = std::polar(1.0, theta);
  std::vector<cplx> path{f.spec().z0};
  if (f.spec().z0 != cplx{0.0}) path.push_back(0.0);
  path.push_back(r_end * dir);
  PairState prev2, prev1;
  double q2 = -1.0, q1 = -1.0;
  double next_checkpoint = checkpoint_step;
  auto q_of = [&](const PairState& s) { return std::abs(f.denominator(s)) / s.norm(); };
  IntegratorOptions opt;
  opt.tol = f.spec().tol;
  const PairState start = initial_pair(f.spec().z0);
  q1 = q_of(start);
  prev1 = start;
  const PairState end = propagate(f.p(), start, path, opt, [&](const PairState& s) {
    const double q = q_of(s);
    if (q2 >= 0.0 && q1 < q2 && q1 < q && q1 < (1.0 - 1e-8) * std::min(q2, q)) {
      out.seeds.push_back(prev1);
    }
    prev2 = prev1;
    q2 = q1;
    prev1 = s;
    q1 = q;
    if (std::abs(s.z) >= next_checkpoint) {
      out.checkpoints.push_back(s);
      next_checkpoint = std::abs(s.z) + checkpoint_step;
    }
  });
  out.checkpoints.push_back(end);
  return out;
}

// Winding of D along the polygon through `points`, starting from `start`.
// Edges whose argument jump exceeds 0.8 rad are subdivided.
struct ArcResult {
  PairState end;
  double turn = 0.0;
  bool ok = true;
};

ArcResult wind_along(const NevanlinnaFunction& f, const PairState& start, const std::vector<cplx>& points,
                     const IntegratorOptions& opt) {
  ArcResult res;
  PairState s = start;
  cplx d_prev = f.denominator(s);
  std::function<void(cplx, int)> step = [&](cplx target, int depth) {
    const PairState saved = s;
    const cplx d_saved = d_prev;
    PairState next = propagate_to(f.p(), s, target, opt);
    const cplx d_next = f.denominator(next);
    const double jump = (d_prev == cplx{0.0} || d_next == cplx{0.0}) ? kPi : std::arg(d_next / d_prev);
    if (std::abs(jump) > 0.8 && depth < 4) {
      const cplx from = saved.z;
      s = saved;
      d_prev = d_saved;
      constexpr int kSplit = 8;
      for (int k = 1; k <= kSplit; ++k) step(from + (target - from) * (double(k) / kSplit), depth + 1);
      return;
    }
    if (std::abs(jump) > 0.8) res.ok = false;
    res.turn += jump;
    s = next;
    d_prev = d_next;
  };
  for (const cplx z : points) step(z, 0);
  res.end = s;
  return res;
}

struct CircleCount {
  int count = 0;
  bool ok = true;
  double bisector_max = 0.0;
};

// Zero count of D inside a polygon inscribed in |z| = r. Each sector between
// consecutive critical rays is integrated from both rays toward its
// bisector, where the dominant solutions grow.
CircleCount count_in_circle(const NevanlinnaFunction& anchored, const std::vector<double>& rays,
                            double r, double tol) {
  const Polynomial& p = anchored.p();
  IntegratorOptions opt;
  opt.tol = tol;
  opt.monitor_drift = false;
  const int nr = static_cast<int>(rays.size());
  std::vector<PairState> crossing(static_cast<std::size_t>(nr));
  for (int k = 0; k < nr; ++k) {
    const cplx z = std::polar(r, rays[k]);
    crossing[static_cast<std::size_t>(k)] = propagate_to(p, anchored.nearest_anchor(z), z, opt);
  }
  const double chord = 0.5 / (1.0 + local_wavenumber(p, std::polar(r, 0.0)));
  CircleCount out;
  double total = 0.0;
  for (int k = 0; k < nr; ++k) {
    const double t0 = rays[k];
    const double t1 = k + 1 < nr ? rays[k + 1] : rays[0] + kTwoPi;
    const double mid = 0.5 * (t0 + t1);
    const double half_arc = 0.5 * (t1 - t0) * r;
    const int nv = std::max(4, static_cast<int>(std::ceil(half_arc / chord)));
    std::vector<cplx> left, right;
    for (int i = 1; i <= nv; ++i) {
      const double u = double(i) / nv;
      left.push_back(std::polar(r, t0 + u * (mid - t0)));
      right.push_back(std::polar(r, t1 + u * (mid - t1)));
    }
    left.back() = right.back() = std::polar(r, mid);
    const ArcResult l = wind_along(anchored, crossing[static_cast<std::size_t>(k)], left, opt);
    const ArcResult rr =
        wind_along(anchored, crossing[static_cast<std::size_t>((k + 1) % nr)], right, opt);
    const cplx dl = anchored.denominator(l.end);
    const cplx dr = anchored.denominator(rr.end);
    // Both halves end at the bisector with independently scaled states; the
    // scale factors are positive reals, so the arguments compare directly.
    total += l.turn + std::arg(dr / dl) - rr.turn;
    out.ok = out.ok && l.ok && rr.ok;
    // A denominator that has decayed to rounding level relative to the pair
    // carries no argument information.
    if (std::abs(dl) < 1e-6 * l.end.norm() || std::abs(dr) < 1e-6 * rr.end.norm()) out.ok = false;
    const SpherePoint v = anchored.value(l.end);
    out.bisector_max = std::max(out.bisector_max, v.modulus());
  }
  const double n = total / kTwoPi;
  out.count = static_cast<int>(std::lround(n));
  if (std::abs(n - out.count) > 0.05) out.ok = false;
  return out;
}

// A radius in [lo, hi] far from all pole moduli (sorted ascending).
double clear_radius(const std::vector<double>& moduli, double lo, double hi) {
  auto first = std::lower_bound(moduli.begin(), moduli.end(), lo);
  auto last = std::upper_bound(moduli.begin(), moduli.end(), hi);
  std::vector<double> pts{lo};
  pts.insert(pts.end(), first, last);
  pts.push_back(hi);
  double best = hi, best_gap = -1.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double gap = pts[i] - pts[i - 1];
    // Gaps touching the window ends are only half usable.
    const double weight = (i == 1 || i + 1 == pts.size()) ? 0.5 : 1.0;
    if (gap * weight > best_gap) {
      best_gap = gap * weight;
      best = 0.5 * (pts[i] + pts[i - 1]);
      if (i == 1 && pts.size() > 2) best = lo;
      if (i + 1 == pts.size() && pts.size() > 2) best = hi;
    }
  }
  if (pts.size() == 2) best = hi;
  return best;
}

}  // namespace

Census find_poles(const NevanlinnaFunction& f, double rho, const CensusOptions& options) {
  const cplx z0 = f.spec().z0;
  if (!(rho > std::abs(z0) + 1.0)) {
    throw Error(ErrorCode::PreconditionViolated, "census radius must exceed |z0| + 1");
  }
  const Polynomial& p = f.p();
  const std::vector<double> rays = critical_rays(p);
  const int nr = static_cast<int>(rays.size());

  Census census;
  census.spec_name = f.spec().name;
  census.m = p.degree();
  census.search_radius = rho;

  // Phase 1: march every critical ray past rho and polish the minima.
  double k_end = 1e300;
  for (double t : rays) k_end = std::min(k_end, local_wavenumber(p, std::polar(rho, t)));
  const double r_end = 1.02 * rho + 2.0 * kPi / std::max(k_end, 1e-3);
  const double checkpoint_step = std::max(0.5, rho / 1024.0);
  std::vector<RayMarch> marches(static_cast<std::size_t>(nr));
  parallel_for(nr, options.threads, [&](int k) {
    marches[static_cast<std::size_t>(k)] = march_ray(f, rays[k], r_end, checkpoint_step);
  });

  std::vector<Candidate> found;
  std::mutex found_mutex;
  auto polish_all = [&](const std::vector<PairState>& seeds) {
    std::vector<Candidate> local(seeds.size());
    std::vector<char> ok(seeds.size(), 0);
    parallel_for(static_cast<int>(seeds.size()), options.threads, [&](int i) {
      try {
        ok[i] = polish(f, seeds[i], options.max_newton, local[i]);
      } catch (const Error&) {
        ok[i] = 0;
      }
    });
    std::lock_guard<std::mutex> lock(found_mutex);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      if (ok[i]) found.push_back(local[i]);
    }
  };
  auto dedup = [&] {
    std::sort(found.begin(), found.end(),
              [](const Candidate& x, const Candidate& y) { return std::abs(x.a) < std::abs(y.a); });
    std::vector<Candidate> unique;
    for (const Candidate& c : found) {
      bool dup = false;
      for (auto it = unique.rbegin(); it != unique.rend(); ++it) {
        if (std::abs(c.a) - std::abs(it->a) > 1e-8 * std::max(1.0, std::abs(c.a))) break;
        if (std::abs(c.a - it->a) <= 1e-8 * std::max(1.0, std::abs(c.a))) {
          dup = true;
          if (c.residual < it->residual) *it = c;
          break;
        }
      }
      if (!dup) unique.push_back(c);
    }
    found.swap(unique);
  };
  for (const RayMarch& rm : marches) polish_all(rm.seeds);
  dedup();

  // Phase 2: fill gaps along each ray larger than 1.6 local spacings.
  for (int pass = 0; pass < 3; ++pass) {
    std::vector<PairState> seeds;
    for (int k = 0; k < nr; ++k) {
      std::vector<const Candidate*> on_ray;
      for (const Candidate& c : found) {
        if (nearest_ray(rays, c.a) == k) on_ray.push_back(&c);
      }
      for (std::size_t i = 1; i < on_ray.size(); ++i) {
        const Candidate& lo = *on_ray[i - 1];
        const Candidate& hi = *on_ray[i];
        const cplx mid = 0.5 * (lo.a + hi.a);
        const double spacing = kPi / std::max(local_wavenumber(p, mid), 1e-12);
        const double gap = std::abs(hi.a - lo.a);
        if (gap <= 1.6 * spacing) continue;
        const int extra = static_cast<int>(std::floor(gap / spacing));
        for (int e = 1; e <= extra; ++e) {
          const cplx z = lo.a + (hi.a - lo.a) * (double(e) / (extra + 1));
          seeds.push_back(f.state_from(lo.state, z));
        }
      }
    }
    if (seeds.empty()) break;
    const std::size_t before = found.size();
    polish_all(seeds);
    dedup();
    if (found.size() == before) break;
  }

  // Keep |a| < rho, order by modulus with ties broken by argument.
  std::vector<Candidate> kept;
  for (const Candidate& c : found) {
    if (std::abs(c.a) < rho) kept.push_back(c);
  }
  auto arg0 = [](cplx a) {
    const double t = std::arg(a);
    return t < 0.0 ? t + kTwoPi : t;
  };
  std::sort(kept.begin(), kept.end(), [&](const Candidate& x, const Candidate& y) {
    const double mx = std::abs(x.a), my = std::abs(y.a);
    if (std::abs(mx - my) > 1e-9 * std::max(1.0, mx)) return mx < my;
    return arg0(x.a) < arg0(y.a);
  });
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const Candidate& c = kept[i];
    census.records.push_back({static_cast<int>(i + 1), c.a, c.b, c.residual, nearest_ray(rays, c.a)});
    census.anchors.push_back(c.state);
  }

  // Phase 3: zero counts on circles rho_0 > rho_0/2 > ... > core.
  NevanlinnaFunction anchored(f.spec(), f.options());
  anchored.add_anchors(census.anchors);
  for (const RayMarch& rm : marches) anchored.add_anchors(rm.checkpoints);
  std::vector<double> moduli;
  for (const PoleRecord& r : census.records) moduli.push_back(std::abs(r.a));
  double core = options.core_radius;
  if (core <= 0.0) {
    // A few local wavelengths, and never below 2.
    core = 2.0;
    for (int it = 0; it < 60; ++it) {
      const double kk = local_wavenumber(p, core);
      if (core * std::max(kk, 1e-12) >= 4.0 * kPi || core > rho / 2) break;
      core *= 1.25;
    }
  }
  std::vector<double> radii;
  for (double target = rho; target >= core || radii.empty(); target *= 0.5) {
    radii.push_back(clear_radius(moduli, 0.93 * target, target));
    if (target < core * 2) break;
  }
  std::vector<CircleCount> counts(radii.size());
  parallel_for(static_cast<int>(radii.size()), options.threads, [&](int i) {
    try {
      counts[static_cast<std::size_t>(i)] = count_in_circle(anchored, rays, radii[i], options.count_tol);
    } catch (const Error&) {
      counts[static_cast<std::size_t>(i)].ok = false;
    }
  });
  if (!counts.empty()) census.singular_radius = counts.front().bisector_max;
  auto found_below = [&](double r) {
    return static_cast<int>(std::lower_bound(moduli.begin(), moduli.end(), r) - moduli.begin());
  };
  for (std::size_t i = 0; i < radii.size(); ++i) {
    AnnulusCheck a;
    a.outer = radii[i];
    a.inner = i + 1 < radii.size() ? radii[i + 1] : 0.0;
    const int inner_count = i + 1 < radii.size() ? counts[i + 1].count : 0;
    a.counted = counts[i].count - inner_count;
    a.found = found_below(a.outer) - found_below(a.inner);
    a.contour_ok = counts[i].ok && (i + 1 >= radii.size() || counts[i + 1].ok);
    census.annuli.push_back(a);
  }

  // Counting-function cross-check against the fitted law K r^rho.
  if (census.records.size() >= 20) {
    const int n = static_cast<int>(census.records.size());
    std::vector<double> x, y;
    for (int j = 1; j <= n; ++j) {
      x.push_back(std::abs(census.records[j - 1].a));
      y.push_back(j);
    }
    const FitReport fit = fit_power_law(x, y, n / 2 + 1, n);
    for (const AnnulusCheck& a : census.annuli) {
      const double expected =
          fit.constant * (std::pow(a.outer, fit.exponent) - std::pow(a.inner, fit.exponent));
      if (expected >= 10.0 && std::abs(a.found - expected) > 0.2 * expected) {
        census.fit_flagged_radii.push_back(a.outer);
      }
    }
  }
  return census;
}

cplx residue_at(const NevanlinnaFunction& f, cplx a, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "contour radius must be positive");
  const PairState centre = f.state_at(a);
  auto trapezoid = [&](int n) {
    cplx sum = 0.0;
    for (int k = 0; k < n; ++k) {
      const cplx off = std::polar(r, kTwoPi * k / n);
      const SpherePoint v = f.value(f.state_from(centre, a + off));
      if (v.is_infinity()) throw Error(ErrorCode::ContourInstability, "pole on the contour");
      sum += v.value() * off;
    }
    return sum / static_cast<double>(n);
  };
  const cplx r64 = trapezoid(64);
  const cplx r128 = trapezoid(128);
  const double gap = std::abs(r64 - r128) / std::max(std::abs(r128), 1e-300);
  if (gap > 1e-8) {
    throw Error(ErrorCode::ContourInstability,
                "64 and 128 node residues differ by " + std::to_string(gap) + " relative");
  }
  return r64;
}

FitReport fit_power_law(const std::vector<double>& x, const std::vector<double>& y, int j_min,
                        int j_max) {
  if (j_min < 1 || j_max > static_cast<int>(x.size()) || j_min >= j_max) {
    throw Error(ErrorCode::InvalidArgument, "invalid fit window");
  }
  std::vector<double> lx, ly;
  for (int j = j_min; j <= j_max; ++j) {
    lx.push_back(std::log(x[static_cast<std::size_t>(j - 1)]));
    ly.push_back(std::log(y[static_cast<std::size_t>(j - 1)]));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  FitReport rep;
  rep.j_min = j_min;
  rep.j_max = j_max;
  rep.exponent = sxx > 0.0 ? sxy / sxx : 0.0;
  const double intercept = my - rep.exponent * mx;
  rep.constant = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (intercept + rep.exponent * lx[i]);
    ss += r * r;
  }
  rep.rms = std::sqrt(ss / n);
  return rep;
}

namespace {

void require_records(const Census& c) {
  if (c.records.size() < 20) {
    throw Error(ErrorCode::PreconditionViolated,
                "fits need at least 20 records, census has " + std::to_string(c.records.size()));
  }
}

}  // namespace

FitReport fit_modulus_exponent(const Census& census) {
  require_records(census);
  const int n = static_cast<int>(census.records.size());
  std::vector<double> x, y;
  for (const PoleRecord& r : census.records) {
    x.push_back(r.j);
    y.push_back(std::abs(r.a));
  }
  return fit_power_law(x, y, n / 2 + 1, n);
}

FitReport fit_residue_exponent(const Census& census) {
  require_records(census);
  const int n = static_cast<int>(census.records.size());
  std::vector<double> x, y;
  for (const PoleRecord& r : census.records) {
    x.push_back(r.j);
    y.push_back(std::abs(r.b));
  }
  return fit_power_law(x, y, n / 2 + 1, n);
}

double counting_function_order(const Census& census) {
  require_records(census);
  const int n = static_cast<int>(census.records.size());
  std::vector<double> x, y;
  for (const PoleRecord& r : census.records) {
    x.push_back(std::abs(r.a));
    y.push_back(r.j);
  }
  return fit_power_law(x, y, n / 2 + 1, n).exponent;
}

std::vector<double> default_rays(int m) {
  std::vector<double> rays;
  for (int k = 0; k < m + 2; ++k) rays.push_back(kTwoPi * k / (m + 2));
  return rays;
}

Census synthetic_census(int m, double c_mod, double c_res, int j_max, const std::vector<double>& rays_in,
                        int j_min) {
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "degree must be non-negative");
  if (j_min < 1 || j_max < j_min) throw Error(ErrorCode::InvalidArgument, "need 1 <= j_min <= j_max");
  if (!(c_mod > 0.0 && c_res > 0.0)) throw Error(ErrorCode::InvalidArgument, "constants must be positive");
  const std::vector<double> rays = rays_in.empty() ? default_rays(m) : rays_in;
  Census c;
  c.spec_name = "synthetic_m" + std::to_string(m);
  c.m = m;
  c.synthetic = true;
  c.records.reserve(static_cast<std::size_t>(j_max - j_min + 1));
  const double ea = 2.0 / (m + 2);
  const double eb = -static_cast<double>(m) / (m + 2);
  for (int j = j_min; j <= j_max; ++j) {
    const int label = (j - 1) % static_cast<int>(rays.size());
    const double mod = c_mod * std::pow(static_cast<double>(j), ea);
    c.records.push_back({j, std::polar(mod, rays[static_cast<std::size_t>(label)]),
                         c_res * std::pow(static_cast<double>(j), eb), 0.0, label});
  }
  c.search_radius = std::abs(c.records.back().a);
  return c;
}

void write_census_csv(const Census& census, std::ostream& out) {
  out << kCensusCsvHeader << '\n';
  char buf[512];
  for (const PoleRecord& r : census.records) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.j,
                  r.a.real(), r.a.imag(), r.b.real(), r.b.imag(), std::abs(r.a), std::abs(r.b),
                  r.newton_residual, r.ray_label);
    out << buf;
  }
}

Census read_census_csv(std::istream& in, int m, const std::string& name) {
  Census c;
  c.m = m;
  c.spec_name = name;
  std::string line;
  if (!std::getline(in, line) || line != kCensusCsvHeader) {
    throw Error(ErrorCode::IoError, "census CSV header missing or unexpected");
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 9) {
      throw Error(ErrorCode::IoError, "census CSV line " + std::to_string(lineno) + " has " +
                                          std::to_string(fields.size()) + " fields");
    }
    try {
      PoleRecord r;
      r.j = std::stoi(fields[0]);
      r.a = {std::stod(fields[1]), std::stod(fields[2])};
      r.b = {std::stod(fields[3]), std::stod(fields[4])};
      r.newton_residual = std::stod(fields[7]);
      r.ray_label = std::stoi(fields[8]);
      c.records.push_back(r);
    } catch (const std::exception&) {
      throw Error(ErrorCode::IoError, "census CSV line " + std::to_string(lineno) + " is malformed");
    }
  }
  if (!c.records.empty()) c.search_radius = std::abs(c.records.back().a);
  return c;
}

}  // namespace nevdim
