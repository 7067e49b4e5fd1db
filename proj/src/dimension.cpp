#include "nevdim/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace nevdim {

namespace {

double tau_of(const PoleRecord& r) { return std::abs(r.b) / std::norm(r.a); }

std::vector<const PoleRecord*> admissible_tail(const Census& census, double R) {
  const int M = admissibility_threshold(census, R);
  std::vector<const PoleRecord*> out;
  for (const PoleRecord& r : census.records) {
    if (r.j >= M) out.push_back(&r);
  }
  return out;
}

double exponent_to_t(double slope) {
  if (!(slope < 0.0)) {
    throw Error(ErrorCode::FitUnstable, "tau_j does not decay (slope " + std::to_string(slope) + ")");
  }
  return -1.0 / slope;
}

}  // namespace

double PressureCurve::operator()(double t) const {
  double s = 0.0;
  for (double x : tau) s += std::pow(x, t);
  return s;
}

PressureCurve pressure_curve(const Census& census, double R, const std::vector<double>& t_grid) {
  PressureCurve pc;
  pc.census_name = census.spec_name;
  pc.R = R;
  pc.M = admissibility_threshold(census, R);
  for (const PoleRecord* r : admissible_tail(census, R)) pc.tau.push_back(tau_of(*r));
  pc.t_grid = t_grid;
  for (double t : t_grid) pc.values.push_back(pc(t));
  return pc;
}

double tail_critical_exponent(const Census& census, double R) {
  const auto tail = admissible_tail(census, R);
  if (tail.size() < 8) {
    throw Error(ErrorCode::PreconditionViolated,
                "admissible tail has " + std::to_string(tail.size()) + " records, need 8");
  }
  std::vector<double> x, y;
  for (const PoleRecord* r : tail) {
    x.push_back(r->j);
    y.push_back(tau_of(*r));
  }
  const int n = static_cast<int>(x.size());
  const double t_all = exponent_to_t(fit_power_law(x, y, 1, n).exponent);
  const double t_lo = exponent_to_t(fit_power_law(x, y, 1, n / 2).exponent);
  const double t_hi = exponent_to_t(fit_power_law(x, y, n / 2 + 1, n).exponent);
  if (std::abs(t_lo - t_hi) > 0.05) {
    throw Error(ErrorCode::FitUnstable, "window halves give " + std::to_string(t_lo) + " and " +
                                            std::to_string(t_hi));
  }
  return t_all;
}

double bowen_root_factors(const std::vector<double>& factors) {
  if (factors.size() <= 1) {
    throw Error(ErrorCode::NoRoot, "sum at t = 0 is " + std::to_string(factors.size()) + " <= 1");
  }
  std::vector<double> logs;
  logs.reserve(factors.size());
  for (double k : factors) {
    if (!(k > 0.0)) throw Error(ErrorCode::InvalidArgument, "contraction factors must be positive");
    if (!(k < 1.0)) {
      throw Error(ErrorCode::NoRoot, "factor " + std::to_string(k) + " does not contract");
    }
    logs.push_back(std::log(k));
  }
  auto S = [&](double t) {
    double s = 0.0;
    for (double l : logs) s += std::exp(t * l);
    return s;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (S(hi) > 1.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e9) throw Error(ErrorCode::NoRoot, "sum stays above 1");
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (S(mid) > 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double bowen_root(const Census& census, double R, int alphabet_size, double C, double C1) {
  if (alphabet_size < 1) throw Error(ErrorCode::InvalidArgument, "alphabet size must be >= 1");
  const int M = admissibility_threshold(census, R);
  const int last = M + alphabet_size - 1;
  if (last >= census.first_index() + static_cast<int>(census.size())) {
    throw Error(ErrorCode::PreconditionViolated,
                "census ends before symbol " + std::to_string(last) + " (M(R) = " + std::to_string(M) + ")");
  }
  const double kappa = 4.0 * C1 * C / R;
  std::vector<double> factors;
  factors.reserve(static_cast<std::size_t>(alphabet_size));
  for (int j = M; j <= last; ++j) factors.push_back(kappa * tau_of(census.pole(j)));
  return bowen_root_factors(factors);
}

double mcmullen_bound(const McMullenInput& in) {
  if (in.Delta.empty() || in.Delta.size() != in.d.size()) {
    throw Error(ErrorCode::InvalidArgument, "Delta and d must be non-empty and of equal length");
  }
  double num = 0.0;
  for (std::size_t k = 0; k < in.Delta.size(); ++k) {
    if (!(in.Delta[k] > 0.0 && in.Delta[k] <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "Delta must lie in (0, 1]");
    }
    if (!(in.d[k] > 0.0 && in.d[k] < 1.0)) throw Error(ErrorCode::InvalidArgument, "d must lie in (0, 1)");
    if (k > 0 && !(in.d[k] < in.d[k - 1])) throw Error(ErrorCode::InvalidArgument, "d must decrease");
    num += std::abs(std::log(in.Delta[k]));
  }
  return 2.0 - num / std::abs(std::log(in.d.back()));
}

double mcmullen_formula(int m, double B, double B1, double R) {
  const double L = std::log(R);
  return 2.0 - (std::log(B) - (m / 2.0 + 3.0) * L) / (std::log(B1) - (m / 2.0 + 2.0) * L);
}

McMullenInput mcmullen_input(const McMullenEstimate& est, int depth) {
  if (depth < 1) throw Error(ErrorCode::InvalidArgument, "depth must be >= 1");
  McMullenInput in;
  in.provenance = "measured at R = " + std::to_string(est.R);
  for (int l = 1; l <= depth; ++l) {
    in.Delta.push_back(est.Delta);
    in.d.push_back(std::pow(est.d1, l));
  }
  return in;
}

double spherical_cap_area(const Disk& disk) {
  const double rho = std::abs(disk.center);
  const double r = disk.radius;
  const double alpha = std::atan2(2.0 * r, 1.0 + rho * rho - r * r);
  const double s = std::sin(0.5 * alpha);
  return 4.0 * kPi * s * s;
}

McMullenEstimate mcmullen_lower(const Census& census, double R, double C) {
  if (!(R > 0.0)) throw Error(ErrorCode::InvalidArgument, "R must be positive");
  if (census.search_radius < 2.0 * R) {
    throw Error(ErrorCode::PreconditionViolated, "census radius " + std::to_string(census.search_radius) +
                                                     " does not cover A(R) up to " + std::to_string(2 * R));
  }
  const auto tail = admissible_tail(census, R);
  McMullenEstimate est;
  est.R = R;
  double area = 0.0;
  double tau_max = 0.0;
  for (const PoleRecord* r : tail) {
    tau_max = std::max(tau_max, tau_of(*r));
    const double mod = std::abs(r->a);
    if (mod > R && mod < 2.0 * R) {
      area += spherical_cap_area(Disk(r->a, std::abs(r->b) / (4.0 * R)));
      ++est.poles_in_annulus;
    }
  }
  if (est.poles_in_annulus == 0) {
    throw Error(ErrorCode::EmptyAnnulus, "no admissible poles in A(" + std::to_string(R) + ")");
  }
  const int m = census.m;
  est.density = area / spherical_area(Annulus(R));
  est.Delta = est.density;
  est.d1 = C * tau_max;
  est.B = est.density * std::pow(R, m / 2.0 + 3.0);
  est.B1 = est.d1 * std::pow(R, m / 2.0 + 2.0);
  if (!(est.d1 < 1.0)) {
    throw Error(ErrorCode::PreconditionViolated, "diameter factor " + std::to_string(est.d1) + " is not below 1");
  }
  est.raw = mcmullen_formula(m, est.B, est.B1, R);
  // dim >= 0 always holds, so the clamped value is still a lower bound.
  est.value = std::max(0.0, est.raw);
  return est;
}

EscapeRaster escape_grid(const NevanlinnaFunction& f, const Window& window, int nx, int ny, int N, double R,
                         int threads) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be >= 1");
  if (nx < 1 || ny < 1) throw Error(ErrorCode::InvalidArgument, "raster must be at least 1 x 1");
  EscapeRaster out;
  out.window = window;
  out.nx = nx;
  out.ny = ny;
  out.N = N;
  out.R = R;
  const std::size_t n = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  out.classes.assign(n, OrbitClass::Undefined);
  out.steps.assign(n, 0);
  auto rows = [&](int first, int stride) {
    for (int iy = first; iy < ny; iy += stride) {
      for (int ix = 0; ix < nx; ++ix) {
        const OrbitRecord rec = iterate(f, grid_point(window, nx, ny, ix, iy), N, R);
        const std::size_t k = static_cast<std::size_t>(iy) * nx + ix;
        out.classes[k] = rec.classification;
        out.steps[k] = rec.step;
      }
    }
  };
  const int t = std::clamp(threads, 1, ny);
  if (t == 1) {
    rows(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < t; ++i) pool.emplace_back(rows, i, t);
    for (auto& th : pool) th.join();
  }
  return out;
}

namespace {

double loglog_slope(const std::vector<double>& scales, const std::vector<double>& counts) {
  for (double c : counts) {
    if (!(c > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  }
  std::vector<double> inv;
  for (double e : scales) inv.push_back(1.0 / e);
  return fit_power_law(inv, counts, 1, static_cast<int>(inv.size())).exponent;
}

}  // namespace

BoxCountReport box_count(const CylinderCover& cover) {
  if (cover.levels.size() < 3) throw Error(ErrorCode::InvalidArgument, "box counting needs >= 3 scales");
  BoxCountReport rep;
  rep.source = "cylinder cover";
  for (const auto& level : cover.levels) {
    if (level.empty()) throw Error(ErrorCode::InvalidArgument, "empty cover level");
    double log_sum = 0.0;
    for (const Disk& d : level) log_sum += std::log(2.0 * d.radius);
    rep.scales.push_back(std::exp(log_sum / static_cast<double>(level.size())));
    rep.counts.push_back(static_cast<double>(level.size()));
  }
  rep.slope = loglog_slope(rep.scales, rep.counts);
  return rep;
}

BoxCountReport box_count(const EscapeRaster& raster, const std::vector<int>& block_sizes) {
  if (block_sizes.size() < 3) throw Error(ErrorCode::InvalidArgument, "box counting needs >= 3 scales");
  const double px = std::max((raster.window.x_max - raster.window.x_min) / raster.nx,
                             (raster.window.y_max - raster.window.y_min) / raster.ny);
  BoxCountReport rep;
  rep.source = "escape raster";
  for (int k : block_sizes) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "block sizes must be >= 1");
    const int bx = (raster.nx + k - 1) / k;
    const int by = (raster.ny + k - 1) / k;
    std::vector<char> hit(static_cast<std::size_t>(bx) * by, 0);
    for (int iy = 0; iy < raster.ny; ++iy) {
      for (int ix = 0; ix < raster.nx; ++ix) {
        if (raster.at(ix, iy) == OrbitClass::Stayed) hit[static_cast<std::size_t>(iy / k) * bx + ix / k] = 1;
      }
    }
    rep.scales.push_back(k * px);
    rep.counts.push_back(static_cast<double>(std::count(hit.begin(), hit.end(), 1)));
  }
  rep.slope = loglog_slope(rep.scales, rep.counts);
  return rep;
}

CylinderCover middle_thirds_cover(int depth) {
  if (depth < 1) throw Error(ErrorCode::InvalidArgument, "depth must be >= 1");
  CylinderCover cover;
  std::vector<double> left{0.0};
  double len = 1.0;
  for (int l = 1; l <= depth; ++l) {
    len /= 3.0;
    std::vector<double> next;
    for (double x : left) {
      next.push_back(x);
      next.push_back(x + 2.0 * len);
    }
    left.swap(next);
    std::vector<Disk> disks;
    for (double x : left) disks.emplace_back(cplx(x + 0.5 * len, 0.0), 0.5 * len);
    cover.levels.push_back(std::move(disks));
  }
  return cover;
}

bool DimensionReport::checks_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const OrderingCheck& c) { return c.pass; });
}

namespace {

void add_checks(DimensionReport& rep) {
  const double tol = rep.options.ordering_tol;
  rep.checks.push_back({"theoretical < 1", rep.theoretical < 1.0, ""});
  rep.checks.push_back({"theoretical <= bk_upper", rep.theoretical <= rep.bk_upper, ""});

  bool in_range = true;
  std::string bad;
  auto range = [&](const std::string& what, double v) {
    if (!(v >= 0.0 && v <= 2.0)) {
      in_range = false;
      bad += what + " = " + std::to_string(v) + "; ";
    }
  };
  if (rep.tail_exponent) range("tail exponent", *rep.tail_exponent);
  for (const BowenEntry& b : rep.bowen) {
    if (b.error.empty()) range("bowen root N=" + std::to_string(b.N), b.root);
  }
  for (const McMullenEntry& e : rep.mcmullen) {
    if (e.error.empty()) range("mcmullen R=" + std::to_string(e.R), e.estimate.value);
  }
  if (rep.box && std::isfinite(rep.box->slope)) range("box slope", rep.box->slope);
  rep.checks.push_back({"estimates within [0, 2]", in_range, bad});

  bool bowen_mono = true;
  std::string bowen_detail;
  const BowenEntry* prev_b = nullptr;
  for (const BowenEntry& b : rep.bowen) {
    if (!b.error.empty()) continue;
    if (prev_b && prev_b->N < b.N && !(b.root > prev_b->root)) {
      bowen_mono = false;
      bowen_detail += "N=" + std::to_string(prev_b->N) + " -> " + std::to_string(b.N) + "; ";
    }
    prev_b = &b;
  }
  rep.checks.push_back({"bowen root increasing in N", bowen_mono, bowen_detail});

  bool mc_mono = true;
  bool mc_below = true;
  std::string mono_detail, below_detail;
  const McMullenEntry* prev_m = nullptr;
  for (const McMullenEntry& e : rep.mcmullen) {
    if (!e.error.empty()) continue;
    if (prev_m && prev_m->R < e.R && !(e.estimate.raw > prev_m->estimate.raw)) {
      mc_mono = false;
      mono_detail += "R=" + std::to_string(prev_m->R) + " -> " + std::to_string(e.R) + "; ";
    }
    if (!(e.estimate.value <= rep.theoretical + tol)) {
      mc_below = false;
      below_detail += "R=" + std::to_string(e.R) + "; ";
    }
    prev_m = &e;
  }
  rep.checks.push_back({"mcmullen lower increasing in R", mc_mono, mono_detail});
  rep.checks.push_back({"mcmullen lower <= theoretical", mc_below, below_detail});
}

DimensionReport blank_report(int m, const std::string& name, bool synthetic, const DimensionOptions& opt) {
  DimensionReport rep;
  rep.m = m;
  rep.census_name = name;
  rep.synthetic = synthetic;
  rep.theoretical = theoretical_dimension(m);
  rep.bk_upper = bk_upper_bound(m);
  rep.options = opt;
  return rep;
}

template <class Fn>
std::string capture(Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

DimensionReport report(const Census& census, const DimensionOptions& opt, const NevanlinnaFunction* f) {
  DimensionReport rep = blank_report(census.m, census.spec_name, census.synthetic, opt);
  rep.tail_error = capture([&] { rep.tail_exponent = tail_critical_exponent(census, opt.R); });
  for (int N : opt.alphabet_sizes) {
    BowenEntry e;
    e.N = N;
    e.error = capture([&] { e.root = bowen_root(census, opt.R, N, opt.C, opt.C1); });
    rep.bowen.push_back(e);
  }
  for (double R : opt.R_ladder) {
    McMullenEntry e;
    e.R = R;
    e.error = capture([&] { e.estimate = mcmullen_lower(census, R, opt.C); });
    rep.mcmullen.push_back(e);
  }
  if (opt.box_depth > 0) {
    if (f == nullptr) {
      rep.box_error = "skipped: no function to pull back cylinders";
    } else {
      rep.box_error = capture([&] {
        const int M = admissibility_threshold(census, opt.box_R);
        std::vector<int> symbols;
        for (int j = M; j < M + opt.box_symbols; ++j) symbols.push_back(j);
        rep.box = box_count(cylinder_cover(*f, census, opt.box_R, opt.box_depth, symbols));
      });
    }
  }
  add_checks(rep);
  return rep;
}

long long synthetic_threshold(const SyntheticLaw& law, double R) {
  const double ea = 2.0 / (law.m + 2);
  const double eb = -static_cast<double>(law.m) / (law.m + 2);
  auto ok = [&](long long j) {
    const double x = static_cast<double>(j);
    return law.c_mod * std::pow(x, ea) - 2.0 * law.c_res * std::pow(x, eb) / R > R;
  };
  long long hi = 1;
  while (!ok(hi)) {
    hi *= 2;
    if (hi > (1LL << 60)) throw Error(ErrorCode::PreconditionViolated, "threshold out of range");
  }
  long long lo = hi / 2;  // ok(lo) is false unless hi == 1
  if (hi == 1) return 1;
  while (hi - lo > 1) {
    const long long mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

DimensionReport report(const SyntheticLaw& law, const DimensionOptions& opt) {
  if (law.m < 0) throw Error(ErrorCode::InvalidArgument, "degree must be non-negative");
  DimensionReport rep = blank_report(law.m, "synthetic_m" + std::to_string(law.m), true, opt);
  auto window = [&](long long lo, long long hi) {
    lo = std::max<long long>(1, lo);
    if (hi - lo + 1 > opt.synthetic_record_cap) {
      throw Error(ErrorCode::PreconditionViolated, "needs " + std::to_string(hi - lo + 1) +
                                                       " records, above the cap " +
                                                       std::to_string(opt.synthetic_record_cap));
    }
    if (hi > std::numeric_limits<int>::max()) {
      throw Error(ErrorCode::PreconditionViolated, "symbol index beyond the int range");
    }
    return synthetic_census(law.m, law.c_mod, law.c_res, static_cast<int>(hi), law.rays, static_cast<int>(lo));
  };

  int n_max = 8;
  for (int N : opt.alphabet_sizes) n_max = std::max(n_max, N);
  std::optional<Census> base;
  const std::string base_error = capture([&] {
    const long long M = synthetic_threshold(law, opt.R);
    base = window(M - 2, M + n_max + 1);
  });
  if (base) {
    rep.tail_error = capture([&] { rep.tail_exponent = tail_critical_exponent(*base, opt.R); });
  } else {
    rep.tail_error = base_error;
  }
  for (int N : opt.alphabet_sizes) {
    BowenEntry e;
    e.N = N;
    e.error = base ? capture([&] { e.root = bowen_root(*base, opt.R, N, opt.C, opt.C1); }) : base_error;
    rep.bowen.push_back(e);
  }
  for (double R : opt.R_ladder) {
    McMullenEntry e;
    e.R = R;
    e.error = capture([&] {
      const long long M = synthetic_threshold(law, R);
      const double j_outer = std::pow(2.0 * R / law.c_mod, (law.m + 2) / 2.0);
      if (j_outer > 4e18) throw Error(ErrorCode::PreconditionViolated, "annulus beyond the index range");
      const Census c = window(M - 2, static_cast<long long>(std::ceil(j_outer)) + 2);
      e.estimate = mcmullen_lower(c, R, opt.C);
    });
    rep.mcmullen.push_back(e);
  }
  if (opt.box_depth > 0) rep.box_error = "skipped: a synthetic law has no function";
  add_checks(rep);
  return rep;
}

}  // namespace nevdim
