#include <doctest.h>

#include <cmath>

#include "nevdim/dimension.hpp"

using namespace nevdim;

namespace {

struct TanCensus {
  NevanlinnaFunction f{NevanlinnaSpec::tan()};
  Census census;
  TanCensus() {
    census = find_poles(f, 200.0);
    f.add_anchors(census.anchors);
  }
};

const TanCensus& tan200() {
  static const TanCensus t;
  return t;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("theoretical values") {
  CHECK(theoretical_dimension(0) == doctest::Approx(0.5));
  CHECK(bk_upper_bound(0) == doctest::Approx(2.0 / 3.0));
  CHECK(theoretical_dimension(1) == doctest::Approx(0.6));
  CHECK(bk_upper_bound(1) == doctest::Approx(6.0 / 7.0));
  CHECK(theoretical_dimension(100) == doctest::Approx(102.0 / 104.0));
  for (int m = 0; m <= 100; ++m) {
    CHECK(theoretical_dimension(m) < 1.0);
    CHECK(theoretical_dimension(m) <= bk_upper_bound(m));
  }
}

TEST_CASE("pressure curve is decreasing") {
  const Census c = synthetic_census(1, 1.0, 1.0, 2000, default_rays(1));
  const PressureCurve S = pressure_curve(c, 10.0, {0.7, 0.8, 0.9, 1.0, 1.2});
  REQUIRE(S.values.size() == 5);
  for (std::size_t i = 0; i + 1 < S.values.size(); ++i) CHECK(S.values[i + 1] < S.values[i]);
  CHECK(S(0.9) == doctest::Approx(S.values[2]));
  CHECK(S.M == synthetic_threshold({1, 1.0, 1.0, {}}, 10.0));
}

TEST_CASE("tail critical exponent") {
  SUBCASE("synthetic laws") {
    for (int m = 0; m <= 6; ++m) {
      const Census c = synthetic_census(m, 1.0, 1.0, 20000, default_rays(m));
      CHECK(std::abs(tail_critical_exponent(c, 10.0) - theoretical_dimension(m)) <= 1e-6);
    }
    const Census c2 = synthetic_census(2, 1.0, 1.0, 5000, default_rays(2));
    CHECK(std::abs(tail_critical_exponent(c2, 10.0) - 2.0 / 3.0) <= 1e-10);
  }
  SUBCASE("tan") {
    CHECK(std::abs(tail_critical_exponent(tan200().census, 10.0) - 0.5) <= 0.01);
  }
  SUBCASE("Airy") {
    const Census c = find_poles(NevanlinnaFunction(NevanlinnaSpec::airy()), 30.0);
    CHECK(std::abs(tail_critical_exponent(c, 10.0) - 0.6) <= 0.05);
  }
  SUBCASE("too short a tail") {
    const Census c = synthetic_census(0, 1.0, 1.0, 15, default_rays(0));
    CHECK_THROWS_AS(tail_critical_exponent(c, 10.0), Error);
  }
}

TEST_CASE("Bowen equation") {
  CHECK(code_of([] { bowen_root_factors({0.25}); }) == ErrorCode::NoRoot);
  CHECK(bowen_root_factors({0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(bowen_root_factors({1.0 / 3, 1.0 / 3}) == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-9));
  CHECK(code_of([] { bowen_root_factors({0.5, 1.0}); }) == ErrorCode::NoRoot);
}

TEST_CASE("Bowen roots on the synthetic m = 2 law") {
  const Census c = synthetic_census(2, 1.0, 1.0, 20000, default_rays(2));
  const double R = 100.0;
  double prev = 0.0;
  for (int N : {100, 1000, 10000}) {
    const double t = bowen_root(c, R, N);
    CHECK(t > prev);
    prev = t;
  }
  CHECK(std::abs(prev - 2.0 / 3.0) < 0.05);
}

TEST_CASE("Bowen roots increase with the alphabet for every m") {
  for (int m = 0; m <= 6; ++m) {
    const DimensionReport rep = report(SyntheticLaw{m, 1.0, 1.0, default_rays(m)}, DimensionOptions{});
    REQUIRE(rep.bowen.size() == 3);
    double prev = 0.0;
    for (const auto& b : rep.bowen) {
      REQUIRE(b.error.empty());
      CHECK(b.root > prev);
      prev = b.root;
    }
  }
}

TEST_CASE("McMullen formula") {
  McMullenInput in;
  in.Delta = {1.0, 1.0, 1.0};
  in.d = {0.1, 0.01, 0.001};
  CHECK(mcmullen_bound(in) == doctest::Approx(2.0));
  // Geometric sequences: 2 - l |log Delta| / (l |log d1|).
  in.Delta = {0.1, 0.1, 0.1};
  CHECK(mcmullen_bound(in) == doctest::Approx(2.0 - 3 * std::log(10.0) / (3 * std::log(10.0))));
  for (int m = 0; m <= 6; ++m) {
    CHECK(std::abs(mcmullen_formula(m, 1.0, 1.0, 1e12) - theoretical_dimension(m)) < 1e-12);
  }
}

TEST_CASE("McMullen lower bound on synthetic censuses") {
  const SyntheticLaw law{0, 1.0, 1.0, default_rays(0)};
  const DimensionReport rep = report(law, DimensionOptions{});
  REQUIRE(rep.mcmullen.size() == 4);
  double prev = -1e300;
  for (const auto& e : rep.mcmullen) {
    REQUIRE(e.error.empty());
    CHECK(e.estimate.raw > prev);
    CHECK(e.estimate.value >= 0.0);
    CHECK(e.estimate.value <= 2.0);
    CHECK(e.estimate.value <= theoretical_dimension(0) + 0.05);
    prev = e.estimate.raw;
  }
  CHECK(rep.mcmullen.back().estimate.value >= 0.4);

  // The measured constants carried to R = 10^12 through the closed form.
  const McMullenEstimate& last = rep.mcmullen.back().estimate;
  CHECK(std::abs(mcmullen_formula(0, last.B, last.B1, 1e12) - 0.5) < 1e-3);
}

TEST_CASE("McMullen monotone in R for every m") {
  for (int m = 0; m <= 6; ++m) {
    DimensionOptions opt;
    opt.R_ladder = {1e2, 1e3, 1e4};
    const DimensionReport rep = report(SyntheticLaw{m, 1.0, 1.0, default_rays(m)}, opt);
    double prev = -1e300;
    for (const auto& e : rep.mcmullen) {
      if (!e.error.empty()) continue;
      CHECK(e.estimate.raw > prev);
      prev = e.estimate.raw;
    }
  }
}

TEST_CASE("McMullen measurements on tan") {
  const auto& t = tan200();
  Census c = find_poles(NevanlinnaFunction(NevanlinnaSpec::tan()), 50.0);
  const McMullenEstimate e = mcmullen_lower(c, 20.0);
  // (k + 1/2) pi in (20, 40): k = 6..12 and k = -13..-7.
  CHECK(e.poles_in_annulus == 14);
  CHECK(e.poles_in_annulus >= 0.5 * 20.0 / kPi);
  CHECK(e.density > 0.0);
  CHECK(e.d1 < 1.0);
  const McMullenInput in = mcmullen_input(e, 4);
  REQUIRE(in.d.size() == 4);
  for (std::size_t i = 0; i + 1 < in.d.size(); ++i) CHECK(in.d[i + 1] < in.d[i]);
  for (double D : in.Delta) {
    CHECK(D > 0.0);
    CHECK(D <= 1.0);
  }
  CHECK(code_of([&] { mcmullen_lower(c, 30.0); }) == ErrorCode::PreconditionViolated);
  CHECK(mcmullen_lower(t.census, 50.0).poles_in_annulus == 32);
}

TEST_CASE("empty annulus") {
  Census c = synthetic_census(0, 1.0, 1.0, 10, default_rays(0));
  c.search_radius = 1e6;
  CHECK(code_of([&] { mcmullen_lower(c, 1000.0); }) == ErrorCode::EmptyAnnulus);
}

TEST_CASE("spherical cap area") {
  CHECK(spherical_cap_area(Disk(0.0, 1.0)) == doctest::Approx(kTwoPi).epsilon(1e-14));
  for (const Disk& d : {Disk({3.0, 4.0}, 0.5), Disk({-20.0, 1.0}, 0.01), Disk({0.3, 0.0}, 2.0)})
    CHECK(spherical_cap_area(d) == doctest::Approx(spherical_area(d)).epsilon(1e-8));
}

TEST_CASE("escape rasters") {
  const auto& t = tan200();
  SUBCASE("everything inside B(R) drops at step 0") {
    const EscapeRaster r = escape_grid(t.f, {0.0, 1.0, 0.0, 1.0}, 8, 8, 3, 100.0);
    for (std::size_t i = 0; i < r.classes.size(); ++i) {
      CHECK(r.classes[i] == OrbitClass::Dropped);
      CHECK(r.steps[i] == 0);
    }
  }
  SUBCASE("a pixel on a pole") {
    const EscapeRaster r = escape_grid(t.f, {kPi * 10.5, kPi * 10.5, 0.0, 0.0}, 1, 1, 3, 10.0);
    CHECK(r.at(0, 0) == OrbitClass::HitPole);
    CHECK(r.step_at(0, 0) == 1);
  }
  SUBCASE("survivors sit in the Koebe disks") {
    const double R = 10.0;
    const double poles[] = {9.5 * kPi, 10.5 * kPi, 11.5 * kPi, 12.5 * kPi};
    auto in_outer_disk = [&](cplx z) {
      for (double a : poles)
        if (std::abs(z - a) < 2.0 / R) return true;
      return false;
    };
    const Window wide{30.0, 40.0, -1.0, 1.0};
    const EscapeRaster r = escape_grid(t.f, wide, 400, 80, 3, R, 4);
    for (int iy = 0; iy < r.ny; ++iy)
      for (int ix = 0; ix < r.nx; ++ix)
        if (r.at(ix, iy) == OrbitClass::Stayed) CHECK(in_outer_disk(grid_point(wide, r.nx, r.ny, ix, iy)));
    const EscapeRaster r1 = escape_grid(t.f, wide, 400, 80, 3, R, 1);
    CHECK(r1.classes == r.classes);
    CHECK(r1.steps == r.steps);

    // Survivors are too thin for a 2-D grid at this R; a fine sample of the
    // real axis through the same poles resolves them.
    const Window line{9.5 * kPi - 1.0, 12.5 * kPi + 1.0, 0.0, 0.0};
    const EscapeRaster z = escape_grid(t.f, line, 40000, 1, 3, R, 4);
    int stayed = 0;
    for (int ix = 0; ix < z.nx; ++ix) {
      if (z.at(ix, 0) != OrbitClass::Stayed) continue;
      ++stayed;
      CHECK(in_outer_disk(grid_point(line, z.nx, 1, ix, 0)));
    }
    CHECK(stayed > 0);
  }
}

TEST_CASE("box counting") {
  SUBCASE("single point") {
    CylinderCover c;
    for (int l = 1; l <= 4; ++l) c.levels.push_back({Disk(0.0, std::pow(10.0, -l))});
    CHECK(std::abs(box_count(c).slope) < 1e-12);
  }
  SUBCASE("middle thirds") {
    CHECK(std::abs(box_count(middle_thirds_cover(8)).slope - std::log(2.0) / std::log(3.0)) < 1e-3);
  }
  SUBCASE("depth-3 tan cover on 30 symbols") {
    const auto& t = tan200();
    const double R = 10.0;
    const int M = admissibility_threshold(t.census, R);
    std::vector<int> symbols;
    for (int j = M; j < M + 30; ++j) symbols.push_back(j);
    const BoxCountReport b = box_count(cylinder_cover(t.f, t.census, R, 3, symbols));
    CHECK(b.slope >= 0.35);
    CHECK(b.slope <= 0.65);
  }
  SUBCASE("raster") {
    EscapeRaster r;
    r.nx = 64;
    r.ny = 64;
    r.classes.assign(64 * 64, OrbitClass::Dropped);
    r.steps.assign(64 * 64, 0);
    r.window = {0.0, 1.0, 0.0, 1.0};
    for (int i = 0; i < 64; ++i) r.classes[static_cast<std::size_t>(i) * 64 + i] = OrbitClass::Stayed;
    const BoxCountReport b = box_count(r, {1, 2, 4, 8, 16});
    CHECK(b.slope == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("reports") {
  SUBCASE("synthetic m = 100") {
    DimensionOptions opt;
    opt.R_ladder = {1e2};
    opt.alphabet_sizes = {10};
    const DimensionReport rep = report(SyntheticLaw{100, 1.0, 1.0, default_rays(100)}, opt);
    CHECK(rep.theoretical == doctest::Approx(102.0 / 104.0));
    CHECK(rep.theoretical < 1.0);
  }
  SUBCASE("tan census") {
    DimensionOptions opt;
    opt.R = 10.0;
    opt.R_ladder = {100.0};
    opt.alphabet_sizes = {10, 30, 100};
    const DimensionReport rep = report(tan200().census, opt, &tan200().f);
    CHECK(rep.m == 0);
    CHECK(rep.theoretical == doctest::Approx(0.5));
    CHECK(rep.bk_upper == doctest::Approx(2.0 / 3.0));
    REQUIRE(rep.tail_exponent.has_value());
    for (const auto& c : rep.checks) CHECK_MESSAGE(c.pass, c.name << ": " << c.detail);
  }
  SUBCASE("errors are collected, not thrown") {
    DimensionOptions opt;
    opt.R = 10.0;
    opt.R_ladder = {1e4};
    opt.alphabet_sizes = {1};
    const Census c = find_poles(NevanlinnaFunction(NevanlinnaSpec::tan()), 50.0);
    const DimensionReport rep = report(c, opt);
    REQUIRE(rep.bowen.size() == 1);
    CHECK(!rep.bowen[0].error.empty());
    REQUIRE(rep.mcmullen.size() == 1);
    CHECK(!rep.mcmullen[0].error.empty());
  }
}
