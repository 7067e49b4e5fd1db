#include <doctest.h>

#include <cmath>
#include <random>

#include "nevdim/core_math.hpp"

using namespace nevdim;

namespace {
bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); }
}  // namespace

TEST_CASE("poly_eval on small polynomials") {
  CHECK(poly_eval(Polynomial::constant(1.0), {5, 2}) == cplx{1.0});
  CHECK(close(poly_eval(Polynomial::monomial(1), {0, 3}), {0, 3}, 1e-15));
  CHECK(close(poly_eval(Polynomial::monomial(2), {1, 1}), {0, 2}, 1e-15));
  const Polynomial p({1.0, -2.0, 3.0});
  CHECK(close(p({2.0, 0.0}), {9.0, 0.0}, 1e-15));
}

TEST_CASE("trailing zeros are trimmed") {
  const Polynomial p({1.0, 2.0, 0.0, 0.0});
  CHECK(p.degree() == 1);
  CHECK(p.leading() == cplx{2.0});
  CHECK(Polynomial({0.0, 0.0}).is_zero());
}

TEST_CASE("poly_derivatives are coefficient shifts") {
  {
    auto [d1, d2] = poly_derivatives(Polynomial::monomial(1));
    CHECK(d1 == Polynomial::constant(1.0));
    CHECK(d2.is_zero());
  }
  {
    auto [d1, d2] = poly_derivatives(Polynomial::monomial(2));
    CHECK(d1 == Polynomial::monomial(1, 2.0));
    CHECK(d2 == Polynomial::constant(2.0));
  }
  {
    auto [d1, d2] = poly_derivatives(Polynomial::constant(1.0));
    CHECK(d1.is_zero());
    CHECK(d2.is_zero());
  }
}

TEST_CASE("square-root branch tracking") {
  SUBCASE("constant") {
    const cplx path[] = {0.0, {3, 4}, {-2, 1}};
    for (const auto& s : sqrt_branch_along_path(Polynomial::constant(1.0), path, 1.0))
      CHECK(close(s.root, 1.0, 1e-14));
  }
  SUBCASE("positive real branch of z") {
    const cplx path[] = {1.0, 4.0};
    auto samples = sqrt_branch_along_path(Polynomial::monomial(1), path, 1.0);
    CHECK(close(samples.back().root, 2.0, 1e-13));
    for (const auto& s : samples) CHECK(close(s.root, std::sqrt(s.z.real()), 1e-13));
  }
  SUBCASE("monodromy around the zero of z") {
    std::vector<cplx> loop;
    for (int k = 0; k <= 8; ++k) loop.push_back(std::polar(1.0, kTwoPi * k / 8));
    auto samples = sqrt_branch_along_path(Polynomial::monomial(1), loop, 1.0);
    CHECK(close(samples.back().root, -1.0, 1e-12));
  }
  SUBCASE("root squared equals p along a wandering path") {
    const Polynomial p({{1, 1}, 0.0, {0.5, -2}});
    const cplx path[] = {1.0, {3, 2}, {-1, 4}, {-5, -3}, {2, -2}};
    const cplx p0 = p(path[0]);
    auto samples = sqrt_branch_along_path(p, path, std::sqrt(p0));
    for (const auto& s : samples) CHECK(close(s.root * s.root, p(s.z), 1e-10));
  }
  SUBCASE("zero on the path") {
    const cplx path[] = {-1.0, 1.0};
    CHECK_THROWS_AS(sqrt_branch_along_path(Polynomial::monomial(1), path, {0, 1}), Error);
    try {
      sqrt_branch_along_path(Polynomial::monomial(1), path, {0, 1});
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ZeroClearanceViolated);
    }
  }
}

TEST_CASE("moebius_apply conventions") {
  const MoebiusMap inv(0.0, 1.0, 1.0, 0.0);
  CHECK(close(moebius_apply(inv, cplx{2.0}).value(), 0.5, 1e-15));
  CHECK(moebius_apply(inv, SpherePoint::infinity()).value() == cplx{0.0});
  CHECK(moebius_apply(inv, cplx{0.0}).is_infinity());
  const cplx z{0.3, -7.0};
  CHECK(moebius_apply(MoebiusMap::identity(), z).value() == z);
  const MoebiusMap m(1.0, 2.0, 3.0, 4.0);
  CHECK(close(moebius_apply(m, SpherePoint::infinity()).value(), 1.0 / 3.0, 1e-15));
  CHECK(moebius_apply(m, cplx{-4.0 / 3.0}).is_infinity());
  CHECK_THROWS_AS(MoebiusMap(1.0, 2.0, 2.0, 4.0), Error);
}

TEST_CASE("moebius round trip on random points") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    const MoebiusMap m({g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)});
    const cplx z{g(rng), g(rng)};
    const auto back = moebius_apply(m, moebius_apply(m.inverse(), z));
    REQUIRE(!back.is_infinity());
    CHECK(close(back.value(), z, 1e-11));
  }
}

TEST_CASE("chordal distance") {
  CHECK(chordal_distance(cplx{0.0}, SpherePoint::infinity()) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(chordal_distance(cplx{0.0}, cplx{0.0}) == 0.0);
  CHECK(chordal_distance(cplx{1.0}, cplx{-1.0}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(chordal_distance(SpherePoint::infinity(), SpherePoint::infinity()) == 0.0);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int k = 0; k < 500; ++k) {
    const cplx a{g(rng), g(rng)}, b{g(rng), g(rng)}, c{g(rng), g(rng)};
    const double ab = chordal_distance(a, b), bc = chordal_distance(b, c), ac = chordal_distance(a, c);
    CHECK(ab == doctest::Approx(chordal_distance(b, a)).epsilon(1e-14));
    CHECK(ac <= ab + bc + 1e-14);
    CHECK(ab <= 2.0 + 1e-15);
  }
}

TEST_CASE("spherical area of disks") {
  CHECK(spherical_area(Disk(0.0, 1.0)) == doctest::Approx(kTwoPi).epsilon(1e-10));
  const double r = 1e-4;
  CHECK(spherical_area(Disk(0.0, r)) == doctest::Approx(4 * kPi * r * r).epsilon(1e-6));
  CHECK(spherical_area(Disk(0.0, 1e8)) == doctest::Approx(4 * kPi).epsilon(1e-8));
  for (double rr : {0.1, 0.5, 2.0, 7.0, 40.0}) {
    CHECK(std::abs(spherical_area(Disk(0.0, rr)) - 4 * kPi * rr * rr / (1 + rr * rr)) < 1e-8);
  }
  // Off-centre disk against the cap formula: the image circle subtends angle alpha.
  const Disk d({3.0, 4.0}, 0.5);
  const double rho = 5.0, rr = 0.5;
  const double alpha = std::atan2(2 * rr, 1 + rho * rho - rr * rr);
  CHECK(std::abs(spherical_area(d) - 4 * kPi * std::pow(std::sin(alpha / 2), 2)) < 1e-8);
}

TEST_CASE("annulus geometry") {
  const Annulus a(10.0);
  CHECK(a.outer() == 20.0);
  CHECK(a.contains(cplx{15.0}));
  CHECK(!a.contains(cplx{5.0}));
  CHECK(a.contains(Disk({15.0, 0.0}, 4.0)));
  CHECK(!a.contains(Disk({15.0, 0.0}, 6.0)));
  // Centred annulus: 4 pi (4 s^2/(1+4s^2) - s^2/(1+s^2)).
  const double s = 10.0;
  CHECK(spherical_area(a) == doctest::Approx(4 * kPi * (4 * s * s / (1 + 4 * s * s) - s * s / (1 + s * s))));
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  const auto& rule = gauss_legendre(8);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], 14);
  CHECK(sum == doctest::Approx(2.0 / 15.0).epsilon(1e-14));
}
