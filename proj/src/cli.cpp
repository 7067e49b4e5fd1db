#include "nevdim/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "nevdim/census.hpp"
#include "nevdim/covers.hpp"
#include "nevdim/json_out.hpp"
#include "nevdim/ode.hpp"

namespace nevdim {

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& bytes) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string census_csv(const Census& c) {
  std::ostringstream s;
  write_census_csv(c, s);
  return s.str();
}

struct Context {
  RunConfig cfg;
  std::ostream& out;
  std::ostream& err;
  fs::path dir() const { return fs::path(cfg.out_dir); }
};

/// Census plus an evaluator anchored at every pole.
struct Anchored {
  NevanlinnaFunction f;
  Census census;
};

Anchored build_census(const RunConfig& cfg, double radius) {
  NevanlinnaFunction f(to_spec(cfg));
  CensusOptions opt;
  opt.threads = cfg.threads;
  Census c = find_poles(f, radius, opt);
  f.add_anchors(c.anchors);
  return {std::move(f), std::move(c)};
}

int cmd_census(Context& ctx) {
  Anchored a = build_census(ctx.cfg, ctx.cfg.census_radius);
  const Census& c = a.census;
  write_file(ctx.dir() / "census.csv", census_csv(c));
  Json j = census_summary(c);
  j["config"] = to_json(ctx.cfg);
  write_file(ctx.dir() / "census_fit.json", dump_json(j));
  if (c.size() == 0) ctx.err << "warning: no poles found in |z| < " << ctx.cfg.census_radius << "\n";
  ctx.out << c.size() << " poles, " << (c.complete() ? "complete" : "INCOMPLETE") << "\n";
  if (!c.complete() && !ctx.cfg.allow_incomplete) {
    ctx.err << "SearchIncomplete: zero counts disagree with the poles found (use --allow-incomplete)\n";
    return kExitVerifyFailed;
  }
  return kExitOk;
}

void write_report(Context& ctx, const DimensionReport& rep) {
  Json j = to_json(rep);
  j["config"] = to_json(ctx.cfg);
  write_file(ctx.dir() / "dimension.json", dump_json(j));
  ctx.out << "theoretical " << rep.theoretical << ", tail exponent ";
  if (rep.tail_exponent) {
    ctx.out << *rep.tail_exponent;
  } else {
    ctx.out << "n/a";
  }
  ctx.out << ", checks " << (rep.checks_pass() ? "pass" : "FAIL") << "\n";
}

SyntheticLaw law_of(const RunConfig& cfg) { return {cfg.synthetic_m, cfg.c_mod, cfg.c_res, {}}; }

int cmd_dimension(Context& ctx, std::optional<int> synthetic_m, const std::string& census_path) {
  const DimensionOptions opt = to_dimension_options(ctx.cfg);
  if (synthetic_m) {
    if (*synthetic_m < 0) throw Error(ErrorCode::ConfigError, "--synthetic needs m >= 0");
    ctx.cfg.synthetic_m = *synthetic_m;
    write_report(ctx, report(law_of(ctx.cfg), opt));
    return kExitOk;
  }
  if (!census_path.empty()) {
    std::ifstream in(census_path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + census_path);
    Census c = read_census_csv(in, static_cast<int>(ctx.cfg.poly.size()) - 1, ctx.cfg.name);
    write_report(ctx, report(c, opt));
    return kExitOk;
  }
  Anchored a = build_census(ctx.cfg, ctx.cfg.census_radius);
  write_report(ctx, report(a.census, opt, &a.f));
  return kExitOk;
}

int cmd_synthetic(Context& ctx, std::optional<int> m, std::optional<int> j_max) {
  if (m) ctx.cfg.synthetic_m = *m;
  if (j_max) ctx.cfg.synthetic_j_max = *j_max;
  validate(ctx.cfg);
  const SyntheticLaw law = law_of(ctx.cfg);
  const DimensionOptions opt = to_dimension_options(ctx.cfg);
  int lo = 1;
  int hi = ctx.cfg.synthetic_j_max;
  if (hi == 0) {
    // The window the tail and Bowen estimators use.
    int n_max = 8;
    for (int n : opt.alphabet_sizes) n_max = std::max(n_max, n);
    const long long M = synthetic_threshold(law, opt.R);
    if (M + n_max + 1 > std::numeric_limits<int>::max()) {
      throw Error(ErrorCode::PreconditionViolated, "synthetic window beyond the int range");
    }
    lo = static_cast<int>(std::max<long long>(1, M - 2));
    hi = static_cast<int>(M + n_max + 1);
  }
  const Census c = synthetic_census(law.m, law.c_mod, law.c_res, hi, law.rays, lo);
  write_file(ctx.dir() / "synthetic_census.csv", census_csv(c));
  write_report(ctx, report(law, opt));
  return kExitOk;
}

int cmd_render(Context& ctx) {
  Anchored a = build_census(ctx.cfg, ctx.cfg.census_radius);
  const EscapeRaster r =
      escape_grid(a.f, ctx.cfg.window, ctx.cfg.nx, ctx.cfg.ny, ctx.cfg.N, ctx.cfg.render_R, ctx.cfg.threads);
  write_file(ctx.dir() / "render.ppm", render_ppm(r));
  std::array<int, 4> tally{};
  for (OrbitClass k : r.classes) ++tally[static_cast<std::size_t>(k)];
  ctx.out << "stayed " << tally[0] << ", dropped " << tally[1] << ", hit-pole " << tally[2] << ", undefined "
          << tally[3] << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct Suite {
  std::string name;
  std::string status = "pass";  // pass, fail, not-applicable
  Json detail = Json::object();
};

template <class Fn>
Suite run_suite(const std::string& name, Fn&& fn) {
  Suite s;
  s.name = name;
  try {
    fn(s);
  } catch (const std::exception& e) {
    s.status = "fail";
    s.detail["error"] = e.what();
  }
  return s;
}

std::vector<cplx> schwarzian_samples(const Census& c, const RunConfig& cfg) {
  // Inside |Z| <= 3 the two solutions are comparable, so f' is not
  // exponentially small against f and differences of f keep their digits.
  const Polynomial p(cfg.poly);
  const int m = p.degree();
  const double radius = std::min(0.5 * cfg.census_radius,
                                 std::pow(1.5 * (m + 2) / std::sqrt(std::abs(p.leading())), 2.0 / (m + 2)));
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(-radius, radius);
  std::vector<cplx> out;
  for (int tries = 0; static_cast<int>(out.size()) < cfg.verify_samples && tries < 100000; ++tries) {
    const cplx z(u(rng), u(rng));
    if (std::abs(z) > radius) continue;
    bool clear = true;
    for (const PoleRecord& r : c.records) {
      if (std::abs(r.a - z) < 0.5) {
        clear = false;
        break;
      }
    }
    if (clear) out.push_back(z);
  }
  return out;
}

int cmd_verify(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  std::vector<Suite> suites;
  std::optional<Anchored> a;
  suites.push_back(run_suite("wronskian", [&](Suite& s) {
    a.emplace(build_census(cfg, cfg.census_radius));
    double worst = 0.0;
    for (const PairState& st : a->census.anchors) worst = std::max(worst, wronskian_drift(st, 1.0));
    s.detail["anchors"] = a->census.anchors.size();
    s.detail["max_drift"] = worst;
    s.detail["limit"] = kDriftTol;
    if (!(worst <= kDriftTol)) s.status = "fail";
  }));
  // Without a census the pole-dependent suites fail, but the rest still run.
  const NevanlinnaFunction bare(to_spec(cfg));
  const Census empty;
  const NevanlinnaFunction& f = a ? a->f : bare;
  const Census& c = a ? a->census : empty;
  auto need_census = [&](Suite& s) {
    if (!a) throw Error(ErrorCode::PreconditionViolated, "census unavailable");
    (void)s;
  };

  suites.push_back(run_suite("census_complete", [&](Suite& s) {
    need_census(s);
    s.detail = census_summary(c);
    if (!c.complete()) s.status = "fail";
  }));

  suites.push_back(run_suite("schwarzian", [&](Suite& s) {
    const auto samples = schwarzian_samples(c, cfg);
    double worst = 0.0;
    int used = 0;
    Json skipped = Json::array();
    for (cplx z : samples) {
      try {
        const SchwarzianReport r = schwarzian_residual(f, {z}, cfg.schwarzian_h);
        worst = std::max(worst, r.max_residual);
        ++used;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::StencilNearPole) throw;
        skipped.push_back(Json::array({z.real(), z.imag()}));
      }
    }
    s.detail["h"] = cfg.schwarzian_h;
    s.detail["samples"] = used;
    s.detail["skipped_near_pole"] = skipped;
    s.detail["max_residual"] = worst;
    s.detail["limit"] = 1e-4;
    if (used == 0 || !(worst < 1e-4)) s.status = "fail";
  }));

  const int M = admissibility_threshold(c, cfg.R);
  const int last = c.first_index() + static_cast<int>(c.size()) - 1;

  suites.push_back(run_suite("koebe_sandwich", [&](Suite& s) {
    need_census(s);
    Json reports = Json::array();
    bool applicable = false;
    for (int j = M; j <= last && j < M + 64; ++j) {
      const CheckReport r = koebe_sandwich_check(f, c, branch_info(c, j, cfg.R), 64);
      if (r.status == "not-applicable") continue;
      applicable = true;
      if (!r.pass) s.status = "fail";
      reports.push_back(to_json(r));
    }
    if (!applicable) s.status = "not-applicable";
    s.detail["R"] = cfg.R;
    s.detail["singular_radius"] = c.singular_radius;
    s.detail["checks"] = reports;
  }));

  std::vector<int> symbols;
  for (int j = M; j <= last && j < M + 3; ++j) symbols.push_back(j);

  suites.push_back(run_suite("nesting", [&](Suite& s) {
    need_census(s);
    if (symbols.empty() || !(cfg.R > c.singular_radius)) {
      s.status = "not-applicable";
      return;
    }
    Json reports = Json::array();
    for (int j : symbols) {
      for (int k : symbols) {
        const CheckReport r = verify_nesting(f, c, {j, k}, cfg.R, 32);
        if (!r.pass) s.status = "fail";
        Json e = to_json(r);
        e["code"] = {j, k};
        reports.push_back(e);
      }
    }
    s.detail["checks"] = reports;
  }));

  suites.push_back(run_suite("cylinder_bounds", [&](Suite& s) {
    need_census(s);
    if (symbols.empty() || !(cfg.R > c.singular_radius)) {
      s.status = "not-applicable";
      return;
    }
    Json rows = Json::array();
    std::vector<std::vector<int>> codes;
    for (int j : symbols) {
      codes.push_back({j});
      for (int k : symbols) codes.push_back({j, k});
    }
    for (const auto& code : codes) {
      const double emp = empirical_cylinder_diameter(f, c, code, cfg.R, 64);
      const CylinderEstimate est = cylinder_diameter(c, code, cfg.R, cfg.C, cfg.C1);
      if (!(emp <= est.euclid_diam_bound)) s.status = "fail";
      rows.push_back({{"code", code}, {"empirical", emp}, {"bound", est.euclid_diam_bound}});
    }
    s.detail["cylinders"] = rows;
  }));

  suites.push_back(run_suite("asymptotics", [&](Suite& s) {
    const Polynomial& p = f.p();
    const int m = p.degree();
    const auto rays = critical_rays(p);
    const double bisector = rays[0] + kPi / (m + 2);
    const double r_max = std::min(cfg.census_radius, 40.0);
    const SectorSpec sector(m, bisector, 0.125 * r_max);
    const std::vector<double> ladder{0.125 * r_max, 0.25 * r_max, 0.5 * r_max, r_max};
    const AsymptoticReport r = asymptotic_check(p, sector, ladder, cfg.tol);
    s.detail = to_json(r);
    if (m == 0) {
      for (double e : r.eps1) {
        if (std::isfinite(e) && e > 1e-8) s.status = "fail";
      }
      for (double e : r.eps2) {
        if (std::isfinite(e) && e > 1e-8) s.status = "fail";
      }
    } else if (!(r.decay_exponent >= -1.3 && r.decay_exponent <= -0.7)) {
      s.status = "fail";
    }
  }));

  suites.push_back(run_suite("residues", [&](Suite& s) {
    need_census(s);
    Json rows = Json::array();
    for (std::size_t i = 0; i < c.size() && i < 8; ++i) {
      const PoleRecord& r = c.records[i];
      const double radius = 0.25 * std::abs(r.b) / std::max(cfg.R, 1.0);
      const cplx contour = residue_at(f, r.a, radius);
      const double gap = std::abs(contour - r.b) / std::abs(r.b);
      if (!(gap <= 1e-6)) s.status = "fail";
      rows.push_back({{"j", r.j}, {"contour_gap", gap}});
    }
    if (c.size() == 0) s.status = "not-applicable";
    s.detail["poles"] = rows;
  }));

  suites.push_back(run_suite("asymptotic_value_screen", [&](Suite& s) {
    need_census(s);
    const ScreenReport r = infinity_asymptotic_screen(f, cfg.R, c);
    s.detail["verdict"] = std::string(to_string(r.verdict));
    s.detail["poles_checked"] = r.poles_checked;
    s.detail["findings"] = r.findings;
    if (r.verdict == ScreenVerdict::Evidence) s.status = "fail";
  }));

  bool pass = true;
  Json list = Json::array();
  for (const Suite& s : suites) {
    if (s.status == "fail") pass = false;
    list.push_back({{"name", s.name}, {"status", s.status}, {"detail", s.detail}});
    ctx.out << "  " << s.name << ": " << s.status << "\n";
  }
  Json j;
  j["suites"] = list;
  j["pass"] = pass;
  j["config"] = to_json(cfg);
  write_file(ctx.dir() / "verify.json", dump_json(j));
  ctx.out << "verify: " << (pass ? "pass" : "FAIL") << "\n";
  return pass ? kExitOk : kExitVerifyFailed;
}

}  // namespace

std::string render_ppm(const EscapeRaster& r) {
  std::string bytes = "P6\n" + std::to_string(r.nx) + " " + std::to_string(r.ny) + "\n255\n";
  bytes.reserve(bytes.size() + 3 * r.classes.size());
  for (std::size_t k = 0; k < r.classes.size(); ++k) {
    unsigned char rgb[3] = {0, 0, 0};
    switch (r.classes[k]) {
      case OrbitClass::Dropped: {
        const auto g = static_cast<unsigned char>(40 + (200 * r.steps[k]) / std::max(1, r.N));
        rgb[0] = rgb[1] = rgb[2] = g;
        break;
      }
      case OrbitClass::Stayed: rgb[0] = 255; break;
      case OrbitClass::HitPole: rgb[2] = 255; break;
      case OrbitClass::Undefined: rgb[1] = 160; break;
    }
    bytes.append(reinterpret_cast<const char*>(rgb), 3);
  }
  return bytes;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"nevdim: escaping-set dimension experiments for Nevanlinna functions"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "RNG seed for sampled checks");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  };
  auto* census = app.add_subcommand("census", "pole census with zero-count verification");
  auto* dimension = app.add_subcommand("dimension", "dimension report");
  auto* render = app.add_subcommand("render", "escape-grid PPM image");
  auto* verify = app.add_subcommand("verify", "run the invariant suites");
  auto* synthetic = app.add_subcommand("synthetic", "synthetic census and its report");
  for (auto* s : {census, dimension, render, verify, synthetic}) common(s);
  bool allow_incomplete = false;
  std::optional<double> radius;
  census->add_flag("--allow-incomplete", allow_incomplete, "exit 0 even if zero counts disagree");
  census->add_option("--radius", radius, "search radius");
  std::optional<int> synth_m;
  std::string census_path;
  dimension->add_option("--synthetic", synth_m, "use the synthetic law of degree m");
  dimension->add_option("--census", census_path, "census CSV to analyse");
  std::optional<int> m_opt, jmax_opt;
  synthetic->add_option("--m", m_opt, "degree m");
  synthetic->add_option("--j-max", jmax_opt, "last synthetic index");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ConfigError: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : parse_config_file(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    if (allow_incomplete) cfg.allow_incomplete = true;
    if (radius) cfg.census_radius = *radius;
    validate(cfg);
    Context ctx{cfg, out, err};
    if (census->parsed()) return cmd_census(ctx);
    if (dimension->parsed()) return cmd_dimension(ctx, synth_m, census_path);
    if (render->parsed()) return cmd_render(ctx);
    if (verify->parsed()) return cmd_verify(ctx);
    return cmd_synthetic(ctx, m_opt, jmax_opt);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace nevdim
