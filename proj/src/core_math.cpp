#include "nevdim/core_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace nevdim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::ZeroClearanceViolated: return "ZeroClearanceViolated";
    case ErrorCode::DivisionNearZero: return "DivisionNearZero";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::WronskianDrift: return "WronskianDrift";
    case ErrorCode::StencilNearPole: return "StencilNearPole";
    case ErrorCode::AccuracyBudgetExceeded: return "AccuracyBudgetExceeded";
    case ErrorCode::SearchIncomplete: return "SearchIncomplete";
    case ErrorCode::ContourInstability: return "ContourInstability";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::FitUnstable: return "FitUnstable";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::EmptyAnnulus: return "EmptyAnnulus";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// Polynomial

Polynomial::Polynomial(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
  while (coeffs_.size() > 1 && coeffs_.back() == cplx{0.0}) coeffs_.pop_back();
  if (coeffs_.empty()) coeffs_.push_back(0.0);
}

Polynomial Polynomial::monomial(int degree, cplx coefficient) {
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "negative degree");
  std::vector<cplx> c(static_cast<std::size_t>(degree) + 1, cplx{0.0});
  c.back() = coefficient;
  return Polynomial(std::move(c));
}

cplx Polynomial::operator()(cplx z) const {
  cplx acc = coeffs_.back();
  for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() == 1) return Polynomial();
  std::vector<cplx> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
  return Polynomial(std::move(d));
}

cplx poly_eval(const Polynomial& p, cplx z) { return p(z); }

std::pair<Polynomial, Polynomial> poly_derivatives(const Polynomial& p) {
  Polynomial d1 = p.derivative();
  Polynomial d2 = d1.derivative();
  return {std::move(d1), std::move(d2)};
}

// ---------------------------------------------------------------------------
// Sphere points and Moebius maps

cplx SpherePoint::value() const {
  if (!value_) throw Error(ErrorCode::InvalidArgument, "value() of the point at infinity");
  return *value_;
}

double SpherePoint::modulus() const {
  return value_ ? std::abs(*value_) : std::numeric_limits<double>::infinity();
}

MoebiusMap::MoebiusMap(cplx a, cplx b, cplx c, cplx d) : a_(a), b_(b), c_(c), d_(d) {
  if (a * d - b * c == cplx{0.0}) {
    throw Error(ErrorCode::InvalidArgument, "degenerate Moebius map (ad - bc = 0)");
  }
}

MoebiusMap MoebiusMap::compose(const MoebiusMap& in) const {
  return {a_ * in.a_ + b_ * in.c_, a_ * in.b_ + b_ * in.d_, c_ * in.a_ + d_ * in.c_,
          c_ * in.b_ + d_ * in.d_};
}

SpherePoint moebius_apply(const MoebiusMap& m, const SpherePoint& g) {
  if (g.is_infinity()) {
    if (m.c() == cplx{0.0}) return SpherePoint::infinity();
    return m.a() / m.c();
  }
  const cplx z = g.value();
  const cplx den = m.c() * z + m.d();
  if (den == cplx{0.0}) return SpherePoint::infinity();
  return (m.a() * z + m.b()) / den;
}

double chordal_distance(const SpherePoint& z, const SpherePoint& w) {
  if (z.is_infinity() && w.is_infinity()) return 0.0;
  if (z.is_infinity()) return 2.0 / std::sqrt(1.0 + std::norm(w.value()));
  if (w.is_infinity()) return 2.0 / std::sqrt(1.0 + std::norm(z.value()));
  const cplx a = z.value();
  const cplx b = w.value();
  return 2.0 * std::abs(a - b) / std::sqrt((1.0 + std::norm(a)) * (1.0 + std::norm(b)));
}

Disk::Disk(cplx c, double r) : center(c), radius(r) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "disk radius must be positive");
}

Annulus::Annulus(double s) : inner(s) {
  if (!(s > 0.0)) throw Error(ErrorCode::InvalidArgument, "annulus radius must be positive");
}

// ---------------------------------------------------------------------------
// Quadrature

namespace {

GaussRule make_gauss_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "Gauss rule needs n >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(make_gauss_rule(n));
  return *slot;
}

double spherical_area(const Disk& disk) {
  // rho = tan(psi) keeps the radial integrand smooth even for huge disks;
  // the angular direction is periodic, so the trapezoid rule is spectral.
  constexpr int kRadial = 48;
  constexpr int kAngular = 96;
  const GaussRule& g = gauss_legendre(kRadial);
  const double psi_max = std::atan(disk.radius);
  double total = 0.0;
  for (int i = 0; i < kRadial; ++i) {
    const double psi = 0.5 * psi_max * (g.nodes[static_cast<std::size_t>(i)] + 1.0);
    const double rho = std::tan(psi);
    const double sec2 = 1.0 + rho * rho;
    double ring = 0.0;
    for (int k = 0; k < kAngular; ++k) {
      const double phi = kTwoPi * k / kAngular;
      const cplx z = disk.center + std::polar(rho, phi);
      const double q = 1.0 + std::norm(z);
      ring += 4.0 / (q * q);
    }
    ring *= kTwoPi / kAngular;
    total += g.weights[static_cast<std::size_t>(i)] * ring * rho * sec2;
  }
  return total * 0.5 * psi_max;
}

double spherical_area(const Annulus& annulus) {
  auto centred = [](double r) { return 4.0 * kPi * r * r / (1.0 + r * r); };
  return centred(annulus.outer()) - centred(annulus.inner);
}

// ---------------------------------------------------------------------------
// Branch tracking

namespace {

void check_clearance(const Polynomial& p, cplx z, cplx pz) {
  if (std::abs(pz) < zero_clearance(z)) {
    throw Error(ErrorCode::ZeroClearanceViolated,
                "|p(z)| = " + std::to_string(std::abs(pz)) + " at z = (" +
                    std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")");
  }
  (void)p;
}

cplx nearest_root(cplx pz, cplx previous) {
  const cplx r = std::sqrt(pz);
  return std::abs(r - previous) <= std::abs(r + previous) ? r : -r;
}

}  // namespace

std::vector<BranchSample> sqrt_branch_along_path(const Polynomial& p, std::span<const cplx> path,
                                                 cplx seed) {
  if (path.empty()) throw Error(ErrorCode::InvalidArgument, "empty path");
  const cplx p0 = p(path[0]);
  check_clearance(p, path[0], p0);
  if (std::abs(seed * seed - p0) > 1e-8 * std::abs(p0)) {
    throw Error(ErrorCode::InvalidArgument, "seed^2 does not match p at the path start");
  }
  constexpr double kMaxArgStep = 0.1;
  std::vector<BranchSample> out{{path[0], seed}};
  for (std::size_t s = 1; s < path.size(); ++s) {
    const cplx za = path[s - 1];
    const cplx zb = path[s];
    const double len = std::abs(zb - za);
    if (len == 0.0) continue;
    double t = 0.0;
    double dt = 1.0 / 16.0;
    while (t < 1.0) {
      dt = std::min(dt, 1.0 - t);
      const cplx z = za + (t + dt) * (zb - za);
      const cplx pz = p(z);
      check_clearance(p, z, pz);
      const cplx root = nearest_root(pz, out.back().root);
      if (std::abs(std::arg(root / out.back().root)) >= kMaxArgStep && dt * len > 1e-15 * (1.0 + len)) {
        dt *= 0.5;
        continue;
      }
      t = (dt >= 1.0 - t) ? 1.0 : t + dt;
      out.push_back({t == 1.0 ? zb : z, root});
      dt *= 1.5;
    }
  }
  return out;
}

}  // namespace nevdim
