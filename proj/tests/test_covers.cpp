#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nevdim/covers.hpp"

using namespace nevdim;

namespace {

struct TanSetup {
  NevanlinnaFunction f{NevanlinnaSpec::tan()};
  Census census;
  TanSetup() {
    census = find_poles(f, 50.0);
    f.add_anchors(census.anchors);
  }
  int rank_of(cplx a) const {
    for (const auto& r : census.records)
      if (std::abs(r.a - a) < 1e-9) return r.j;
    FAIL("pole not in census");
    return 0;
  }
};

const TanSetup& tan_setup() {
  static const TanSetup s;
  return s;
}

}  // namespace

TEST_CASE("branch info for the first tan pole") {
  const auto& t = tan_setup();
  const int j = t.rank_of(kPi / 2);
  const BranchInfo b = branch_info(t.census, j, 10.0);
  CHECK(b.inner.radius == doctest::Approx(1.0 / 40));
  CHECK(b.outer.radius == doctest::Approx(1.0 / 5));
  CHECK(b.diam_bound == doctest::Approx(2.0 / 5));
  CHECK(!b.contained_in_BR);
  CHECK(b.derivative_bound(2.0) == doctest::Approx(3.0));
  const BranchInfo b2 = branch_info(t.census, j, 20.0);
  CHECK(b2.outer.radius == doctest::Approx(b.outer.radius / 2));
  CHECK(branch_info(t.census, t.rank_of(10.5 * kPi), 10.0).contained_in_BR);
}

TEST_CASE("admissibility threshold") {
  const auto& t = tan_setup();
  // |a| - 2/R > R with R = 10 first holds at 3.5 pi.
  const int M = admissibility_threshold(t.census, 10.0);
  CHECK(std::abs(t.census.pole(M).a) == doctest::Approx(3.5 * kPi));
  CHECK(std::abs(t.census.pole(M - 1).a) == doctest::Approx(2.5 * kPi));
  CHECK(is_admissible(t.census, M, 10.0));
  CHECK(!is_admissible(t.census, M - 1, 10.0));
}

TEST_CASE("Koebe sandwich") {
  const auto& t = tan_setup();
  SUBCASE("first pole at R = 10") {
    const BranchInfo b = branch_info(t.census, t.rank_of(kPi / 2), 10.0);
    const CheckReport r = koebe_sandwich_check(t.f, t.census, b, 64);
    CHECK(r.status == "pass");
    CHECK(r.pass);
    // |tan| on the outer circle is at most about 5.1.
    double worst = 0.0;
    for (int k = 0; k < 64; ++k) worst = std::max(worst, std::abs(std::tan(kPi / 2 + std::polar(0.2, kTwoPi * k / 64))));
    CHECK(worst < 5.2);
  }
  SUBCASE("every admissible pole") {
    const int M = admissibility_threshold(t.census, 10.0);
    for (int j = M; j <= static_cast<int>(t.census.size()); ++j) {
      const CheckReport r = koebe_sandwich_check(t.f, t.census, branch_info(t.census, j, 10.0), 64);
      CHECK(r.pass);
      CHECK(r.samples >= 64);
    }
  }
  SUBCASE("R below the singular radius") {
    const BranchInfo b = branch_info(t.census, t.rank_of(kPi / 2), 0.5);
    CHECK(koebe_sandwich_check(t.f, t.census, b, 16).status == "not-applicable");
  }
}

TEST_CASE("inverse branches") {
  const auto& t = tan_setup();
  const double R = 2.0;
  const int j = t.rank_of(2.5 * kPi);
  SUBCASE("infinity maps to the pole") {
    const InverseResult r = newton_inverse(t.f, t.census, j, SpherePoint::infinity(), R);
    CHECK(std::abs(r.z - 2.5 * kPi) < 1e-12);
  }
  SUBCASE("arctan oracle") {
    const InverseResult r = newton_inverse(t.f, t.census, j, cplx{100.0}, R);
    CHECK(std::abs(r.z - (2 * kPi + std::atan(100.0))) < 1e-10);
    CHECK(std::abs(r.derivative - 1.0 / (1.0 + 1e4)) < 1e-12);
  }
  SUBCASE("round trip on random targets") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> rad(1.0, 100.0), ang(0.0, kTwoPi);
    const double Rr = 10.0;
    const int M = admissibility_threshold(t.census, Rr);
    for (int k = 0; k < 100; ++k) {
      const cplx w = std::polar(Rr * rad(rng) * 1.0001, ang(rng));
      const int jj = M + k % 10;
      const InverseResult r = newton_inverse(t.f, t.census, jj, w, Rr);
      const SpherePoint back = t.f.value(r.z);
      REQUIRE(!back.is_infinity());
      CHECK(std::abs(back.value() - w) <= 1e-8 * std::abs(w));
      CHECK(std::abs(r.z - t.census.pole(jj).a) < 2.0 / Rr);
    }
  }
  SUBCASE("inadmissible symbol") {
    try {
      newton_inverse(t.f, t.census, t.rank_of(kPi / 2), cplx{100.0}, 10.0);
      FAIL("expected PreconditionViolated");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::PreconditionViolated);
    }
  }
}

TEST_CASE("cylinder diameter bounds") {
  const auto& t = tan_setup();
  const double R = 10.0;
  const int j = t.rank_of(10.5 * kPi);
  const CylinderEstimate d1 = cylinder_diameter(t.census, {j}, R);
  CHECK(d1.euclid_diam_bound == doctest::Approx(4.0 / R));
  const CylinderEstimate d2 = cylinder_diameter(t.census, {j, j}, R);
  CHECK(d2.euclid_diam_bound == doctest::Approx(4.41e-3).epsilon(2e-3));
  CHECK(d2.euclid_diam_bound == doctest::Approx(12.0 * 0.4 / std::pow(10.5 * kPi, 2)));
  CHECK(d2.sphere_diam_bound == doctest::Approx(12.0 * 16.0 / R / std::pow(10.5 * kPi, 4)));
  const int M = admissibility_threshold(t.census, R);
  std::vector<int> code{M};
  double prev = cylinder_diameter(t.census, code, R).euclid_diam_bound;
  for (int k = 1; k < 5; ++k) {
    code.push_back(M + 3 * k);
    const double next = cylinder_diameter(t.census, code, R).euclid_diam_bound;
    CHECK(next < prev);
    prev = next;
  }
}

TEST_CASE("nesting of depth-2 cylinders") {
  const auto& t = tan_setup();
  const double R = 10.0;
  const int M = admissibility_threshold(t.census, R);
  CHECK(verify_nesting(t.f, t.census, {M}, R, 16).pass);
  for (int a : {M, M + 5, M + 17}) {
    for (int b : {M, M + 1, M + 11}) {
      const CheckReport r16 = verify_nesting(t.f, t.census, {a, b}, R, 16);
      const CheckReport r64 = verify_nesting(t.f, t.census, {a, b}, R, 64);
      CHECK(r16.pass);
      CHECK(r64.pass);
      CHECK(r64.worst_margin > 0.0);
    }
  }
  try {
    verify_nesting(t.f, t.census, {t.rank_of(kPi / 2), M}, R, 16);
    FAIL("expected PreconditionViolated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PreconditionViolated);
  }
}

TEST_CASE("empirical diameters are dominated by the bounds") {
  const auto& t = tan_setup();
  const double R = 10.0;
  const int n = static_cast<int>(t.census.size());
  std::vector<int> outer;
  for (int j = n; j > n - 20; --j) {
    REQUIRE(is_admissible(t.census, j, R));
    outer.push_back(j);
  }
  for (int j : outer) {
    const double e = empirical_cylinder_diameter(t.f, t.census, {j}, R, 16);
    const double b = std::abs(t.census.pole(j).b);
    CHECK(e >= b / (2 * R));
    CHECK(e <= 4 * b / R);
    CHECK(e <= cylinder_diameter(t.census, {j}, R).euclid_diam_bound);
  }
  for (int a : outer) {
    for (int b : outer) {
      const double e = empirical_cylinder_diameter(t.f, t.census, {a, b}, R, 16);
      CHECK(e <= cylinder_diameter(t.census, {a, b}, R).euclid_diam_bound);
    }
  }
  const double e16 = empirical_cylinder_diameter(t.f, t.census, {outer[0], outer[3]}, R, 16);
  const double e64 = empirical_cylinder_diameter(t.f, t.census, {outer[0], outer[3]}, R, 64);
  CHECK(std::abs(e16 - e64) <= 0.1 * e64);
}

TEST_CASE("spherical conversion constant") {
  const auto& t = tan_setup();
  const double R = 10.0;
  const int M = admissibility_threshold(t.census, R);
  for (int j = M; j <= static_cast<int>(t.census.size()); ++j) {
    const BranchInfo b = branch_info(t.census, j, R);
    std::vector<cplx> pts;
    for (int k = 0; k < 32; ++k) pts.push_back(b.a + std::polar(0.9 * b.outer.radius, kTwoPi * k / 32));
    const double chi = spherical_diameter(pts);
    const double eu = euclidean_diameter(pts);
    CHECK(chi <= kDefaultC1 / std::norm(b.a) * eu);
  }
}

TEST_CASE("cover indexing") {
  const auto& t = tan_setup();
  const double R = 10.0;
  const int M = admissibility_threshold(t.census, R);
  const std::vector<int> symbols{M, M + 1, M + 2};
  const CylinderCover cover = cylinder_cover(t.f, t.census, R, 2, symbols);
  REQUIRE(cover.levels.size() == 2);
  CHECK(cover.levels[0].size() == 3);
  CHECK(cover.levels[1].size() == 9);
  for (std::size_t k = 0; k < 3; ++k) {
    const Disk& parent = cover.levels[0][k];
    for (std::size_t s = 0; s < 3; ++s) {
      const Disk& child = cover.levels[1][k * 3 + s];
      CHECK(std::abs(child.center - parent.center) + child.radius <= parent.radius);
    }
  }
}
