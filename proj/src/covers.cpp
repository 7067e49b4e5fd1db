#include "nevdim/covers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace nevdim {

int admissibility_threshold(const Census& census, double R) {
  if (!(R > 0.0)) throw Error(ErrorCode::InvalidArgument, "R must be positive");
  int last_bad = census.first_index() - 1;
  for (const PoleRecord& r : census.records) {
    if (!(std::abs(r.a) - 2.0 * std::abs(r.b) / R > R)) last_bad = r.j;
  }
  return last_bad + 1;
}

bool is_admissible(const Census& census, int j, double R) {
  return j >= admissibility_threshold(census, R) &&
         j < census.first_index() + static_cast<int>(census.size());
}

BranchInfo branch_info(const Census& census, int j, double R) {
  if (!(R > 0.0)) throw Error(ErrorCode::InvalidArgument, "R must be positive");
  const PoleRecord& rec = census.pole(j);
  const double rb = std::abs(rec.b);
  if (!(rb > 0.0)) throw Error(ErrorCode::PreconditionViolated, "zero residue at pole " + std::to_string(j));
  BranchInfo info;
  info.j = j;
  info.R = R;
  info.a = rec.a;
  info.b = rec.b;
  info.inner = Disk(rec.a, rb / (4.0 * R));
  info.outer = Disk(rec.a, 2.0 * rb / R);
  info.diam_bound = 2.0 * info.outer.radius;
  info.contained_in_BR = std::abs(rec.a) - info.outer.radius > R;
  return info;
}

CheckReport koebe_sandwich_check(const NevanlinnaFunction& f, const Census& census,
                                 const BranchInfo& info, int n_samples) {
  if (n_samples < 1) throw Error(ErrorCode::InvalidArgument, "need at least one sample");
  CheckReport rep;
  rep.pole_index = info.j;
  rep.R = info.R;
  if (!(info.R > census.singular_radius)) {
    rep.status = "not-applicable";
    rep.pass = false;
    rep.failures.push_back("R = " + std::to_string(info.R) + " does not exceed the singular radius " +
                           std::to_string(census.singular_radius));
    return rep;
  }
  double worst = std::numeric_limits<double>::infinity();
  auto record = [&](double margin, const std::string& what, cplx z) {
    worst = std::min(worst, margin);
    if (!(margin >= 0.0) && rep.failures.size() < 16) {
      rep.failures.push_back(what + " at (" + std::to_string(z.real()) + ", " +
                             std::to_string(z.imag()) + "): margin " + std::to_string(margin));
    }
  };
  const double R = info.R;
  for (int k = 0; k < n_samples; ++k) {
    const cplx e = std::polar(1.0, kTwoPi * (k + 0.5) / n_samples);
    for (double frac : {1.0, 0.5}) {
      const cplx z = info.a + frac * info.inner.radius * e;
      const double mod = f.value(z).modulus();
      record((mod - R) / R, "inner disk |f| <= R", z);
      ++rep.samples;
    }
    const cplx z = info.a + info.outer.radius * e;
    const double mod = f.value(z).modulus();
    record((R - mod) / R, "outer circle |f| > R", z);
    ++rep.samples;
  }
  rep.worst_margin = worst;
  rep.pass = worst >= 0.0;
  rep.status = rep.pass ? "pass" : "fail";
  return rep;
}

namespace {

void require_admissible(const Census& census, int j, double R) {
  const int M = admissibility_threshold(census, R);
  if (j < M || j >= census.first_index() + static_cast<int>(census.size())) {
    throw Error(ErrorCode::PreconditionViolated,
                "symbol " + std::to_string(j) + " is not admissible (M(R) = " + std::to_string(M) + ")");
  }
}

}  // namespace

InverseResult newton_inverse(const NevanlinnaFunction& f, const Census& census, int j,
                             const SpherePoint& w, double R) {
  require_admissible(census, j, R);
  if (!(w.modulus() > R)) {
    throw Error(ErrorCode::PreconditionViolated, "|w| must exceed R");
  }
  const PoleRecord& rec = census.pole(j);
  const cplx det = f.spec().M.determinant();
  if (w.is_infinity()) {
    const PairState s = f.state_at(rec.a);
    const cplx d = f.denominator(s);
    return {rec.a, -d * d / (det * s.wronskian()), 0};
  }
  const cplx wv = w.value();
  const cplx seed = rec.a + rec.b / wv;
  PairState s = f.state_at(seed);
  constexpr int kMaxIter = 50;
  const double outer = 2.0 * std::abs(rec.b) / R;
  for (int it = 1; it <= kMaxIter; ++it) {
    const cplx n = f.numerator(s);
    const cplx d = f.denominator(s);
    const double miss = std::abs(n - wv * d) / std::abs(wv * d);
    const cplx step = (d * n - n * n / wv) / (det * s.wronskian());
    if (miss <= 1e-8 && std::abs(step) <= 1e-13 * (1.0 + std::abs(s.z))) {
      if (std::abs(s.z - rec.a) > outer * (1.0 + 1e-9)) {
        throw Error(ErrorCode::NewtonDiverged, "converged outside the outer disk of pole " +
                                                   std::to_string(j));
      }
      return {s.z, -d * d / (det * s.wronskian()), it};
    }
    cplx dz = -step;
    // Stay within the outer disk scale; Newton never needs longer steps here.
    if (std::abs(dz) > outer) dz *= outer / std::abs(dz);
    s = f.state_from(s, s.z + dz);
  }
  const cplx n = f.numerator(s);
  const cplx d = f.denominator(s);
  const double miss = std::abs(n - wv * d) / std::abs(wv * d);
  if (miss <= 1e-8 && std::abs(s.z - rec.a) <= outer * (1.0 + 1e-9)) {
    return {s.z, -d * d / (det * s.wronskian()), kMaxIter};
  }
  throw Error(ErrorCode::NewtonDiverged,
              "no convergence for pole " + std::to_string(j) + " from seed (" +
                  std::to_string(seed.real()) + ", " + std::to_string(seed.imag()) + "), w = (" +
                  std::to_string(wv.real()) + ", " + std::to_string(wv.imag()) +
                  "), last relative miss " + std::to_string(miss));
}

CylinderEstimate cylinder_diameter(const Census& census, const std::vector<int>& code, double R,
                                   double C, double C1) {
  if (code.empty()) throw Error(ErrorCode::InvalidArgument, "empty cylinder code");
  for (int j : code) require_admissible(census, j, R);
  CylinderEstimate est;
  est.code = code;
  est.C = C;
  est.C1 = C1;
  const double l = static_cast<double>(code.size());
  double euclid = std::pow(C, l - 1.0) * 4.0 / R * std::abs(census.pole(code[0]).b);
  double sphere = std::pow(C, l - 1.0) * 4.0 * C1 / R;
  for (std::size_t k = 0; k < code.size(); ++k) {
    const PoleRecord& r = census.pole(code[k]);
    const double tau = std::abs(r.b) / std::norm(r.a);
    if (k > 0) euclid *= tau;
    sphere *= tau;
  }
  est.euclid_diam_bound = euclid;
  est.sphere_diam_bound = sphere;
  return est;
}

namespace {

// g_{code[0]} o ... o g_{code[n-1]} applied to w.
cplx pull_back(const NevanlinnaFunction& f, const Census& census, const std::vector<int>& code,
               std::size_t n, cplx w, double R) {
  SpherePoint cur = w;
  for (std::size_t k = n; k-- > 0;) cur = newton_inverse(f, census, code[k], cur, R).z;
  return cur.value();
}

double winding_number(const std::vector<cplx>& poly, cplx z) {
  double turn = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const cplx u = poly[i] - z;
    const cplx v = poly[(i + 1) % poly.size()] - z;
    turn += std::arg(v / u);
  }
  return turn / kTwoPi;
}

double distance_to_polygon(const std::vector<cplx>& poly, cplx z) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const cplx a = poly[i];
    const cplx b = poly[(i + 1) % poly.size()];
    const cplx ab = b - a;
    double t = std::norm(ab) > 0.0 ? ((z - a) * std::conj(ab)).real() / std::norm(ab) : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, std::abs(z - (a + t * ab)));
  }
  return best;
}

}  // namespace

CheckReport verify_nesting(const NevanlinnaFunction& f, const Census& census, const std::vector<int>& code,
                           double R, int samples) {
  if (code.empty()) throw Error(ErrorCode::InvalidArgument, "empty cylinder code");
  for (int j : code) require_admissible(census, j, R);
  if (samples < 3) throw Error(ErrorCode::InvalidArgument, "need at least 3 samples");
  CheckReport rep;
  rep.pole_index = code.back();
  rep.R = R;
  if (code.size() < 2) {
    rep.status = "pass";
    rep.worst_margin = std::numeric_limits<double>::infinity();
    return rep;
  }
  const std::size_t l = code.size();
  const BranchInfo parent_info = branch_info(census, code[l - 2], R);
  const BranchInfo child_info = branch_info(census, code[l - 1], R);
  std::vector<cplx> parent;
  for (int k = 0; k < samples; ++k) {
    const cplx w = parent_info.a + parent_info.outer.radius * std::polar(1.0, kTwoPi * k / samples);
    parent.push_back(pull_back(f, census, code, l - 2, w, R));
  }
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const cplx w = child_info.a + child_info.outer.radius * std::polar(1.0, kTwoPi * (k + 0.5) / samples);
    const cplx z = pull_back(f, census, code, l - 1, w, R);
    const bool inside = std::abs(winding_number(parent, z)) > 0.5;
    const double d = distance_to_polygon(parent, z);
    const double margin = inside ? d : -d;
    worst = std::min(worst, margin);
    ++rep.samples;
    if (!inside && rep.failures.size() < 16) {
      rep.failures.push_back("child sample " + std::to_string(k) + " outside the parent by " +
                             std::to_string(d));
    }
  }
  rep.worst_margin = worst;
  rep.pass = worst > 0.0;
  rep.status = rep.pass ? "pass" : "fail";
  return rep;
}

double euclidean_diameter(const std::vector<cplx>& pts) {
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t k = i + 1; k < pts.size(); ++k) d = std::max(d, std::abs(pts[i] - pts[k]));
  }
  return d;
}

double spherical_diameter(const std::vector<cplx>& pts) {
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t k = i + 1; k < pts.size(); ++k) d = std::max(d, chordal_distance(pts[i], pts[k]));
  }
  return d;
}

double empirical_cylinder_diameter(const NevanlinnaFunction& f, const Census& census,
                                   const std::vector<int>& code, double R, int samples) {
  if (code.empty() || code.size() > 3) {
    throw Error(ErrorCode::PreconditionViolated, "empirical cylinders need depth 1 to 3");
  }
  if (samples < 3) throw Error(ErrorCode::InvalidArgument, "need at least 3 samples");
  for (int j : code) require_admissible(census, j, R);
  const double radius = R * (1.0 + 1e-9);
  std::vector<cplx> pts;
  for (int k = 0; k < samples; ++k) {
    pts.push_back(pull_back(f, census, code, code.size(), std::polar(radius, kTwoPi * k / samples), R));
  }
  return euclidean_diameter(pts);
}

CylinderCover cylinder_cover(const NevanlinnaFunction& f, const Census& census, double R, int depth,
                             const std::vector<int>& symbols) {
  if (depth < 1) throw Error(ErrorCode::InvalidArgument, "depth must be >= 1");
  if (symbols.empty()) throw Error(ErrorCode::InvalidArgument, "empty alphabet");
  for (int j : symbols) require_admissible(census, j, R);
  // Per code suffix: the pulled-back pole and the derivative of the branches
  // applied so far.
  struct Node {
    cplx z;
    cplx deriv;
    double base;  // 2|b_{j_l}| / R of the innermost symbol
  };
  CylinderCover cover;
  std::vector<Node> level;
  for (int j : symbols) {
    const PoleRecord& r = census.pole(j);
    level.push_back({r.a, 1.0, 2.0 * std::abs(r.b) / R});
  }
  for (int l = 1; l <= depth; ++l) {
    std::vector<Disk> disks;
    disks.reserve(level.size());
    for (const Node& nd : level) disks.emplace_back(nd.z, nd.base * std::abs(nd.deriv));
    cover.levels.push_back(std::move(disks));
    if (l == depth) break;
    std::vector<Node> next;
    next.reserve(level.size() * symbols.size());
    for (int j : symbols) {
      for (const Node& nd : level) {
        const InverseResult inv = newton_inverse(f, census, j, nd.z, R);
        next.push_back({inv.z, inv.derivative * nd.deriv, nd.base});
      }
    }
    level.swap(next);
  }
  return cover;
}

}  // namespace nevdim
