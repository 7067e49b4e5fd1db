#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nevdim/cli.hpp"
#include "nevdim/config.hpp"

using namespace nevdim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nevdim_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(std::vector<std::string> args) {
  std::ostringstream out, err;
  return run_cli(args, out, err);
}

fs::path write_config(const fs::path& dir, const RunConfig& cfg) {
  const fs::path p = dir / "run.cfg";
  std::ofstream(p) << emit_config(cfg);
  return p;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

int csv_rows(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line;
  int n = -1;  // header
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n;
}

}  // namespace

TEST_CASE("config round trip") {
  RunConfig cfg;
  cfg.name = "custom";
  cfg.poly = {{0.25, -1.0}, 0.0, {3.0, 0.125}};
  cfg.moebius = {cplx{1.0, 2.0}, 0.1, cplx{0.0, -1.0}, 7.0};
  cfg.z0 = {0.5, 0.3};
  cfg.R = 12.5;
  cfg.R_ladder = {1.0 / 3.0, 200.0};
  cfg.alphabet_sizes = {5, 7};
  cfg.window = {-1.0, 2.0, -0.1, 0.7};
  cfg.seed = 123456789012345ULL;
  cfg.allow_incomplete = true;
  cfg.out_dir = "some/dir";
  const std::string text = emit_config(cfg);
  std::istringstream in(text);
  const RunConfig back = parse_config(in);
  CHECK(back == cfg);
  CHECK(emit_config(back) == text);
  CHECK(back.R_ladder[0] == cfg.R_ladder[0]);

  for (const char* name : {"tan.cfg", "airy.cfg", "weber.cfg", "synthetic.cfg"}) {
    const RunConfig shipped = parse_config_file(std::string(NEVDIM_SOURCE_DIR) + "/configs/" + name);
    std::istringstream again(emit_config(shipped));
    CHECK(parse_config(again) == shipped);
    CHECK_NOTHROW(validate(shipped));
  }
}

TEST_CASE("config errors") {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return parse_config(in);
  };
  CHECK_THROWS_AS(parse("[function]\nbogus = 1\n"), Error);
  CHECK_THROWS_AS(parse("[census]\nradius = abc\n"), Error);
  RunConfig bad;
  bad.moebius = {1.0, 2.0, 2.0, 4.0};
  CHECK_THROWS_AS(validate(bad), Error);
  bad = RunConfig{};
  bad.census_radius = -1.0;
  CHECK_THROWS_AS(validate(bad), Error);
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("exit");
  CHECK(run({"frobnicate"}) == kExitConfig);
  CHECK(run({}) == kExitConfig);
  {
    RunConfig cfg;
    cfg.moebius = {1.0, 2.0, 2.0, 4.0};
    cfg.out_dir = (dir / "degenerate").string();
    CHECK(run({"verify", "--config", write_config(dir, cfg).string()}) == kExitConfig);
  }
  CHECK(run({"census", "--config", (dir / "missing.cfg").string()}) == kExitConfig);
  {
    RunConfig cfg;
    cfg.census_radius = 20.0;
    cfg.tol = 1e-2;
    cfg.out_dir = (dir / "loose").string();
    CHECK(run({"verify", "--config", write_config(dir, cfg).string()}) == kExitVerifyFailed);
    const auto j = read_json(dir / "loose" / "verify.json");
    bool schwarzian_failed = false;
    for (const auto& s : j["suites"])
      if (s["name"] == "schwarzian") schwarzian_failed = s["status"] == "fail";
    CHECK(schwarzian_failed);
  }
}

TEST_CASE("census command") {
  const fs::path dir = scratch("census");
  RunConfig cfg;
  cfg.census_radius = 20.0;
  cfg.out_dir = (dir / "tan").string();
  const fs::path cfg_path = write_config(dir, cfg);
  CHECK(run({"census", "--config", cfg_path.string()}) == kExitOk);
  CHECK(csv_rows(dir / "tan" / "census.csv") == 12);
  CHECK(read_json(dir / "tan" / "census_fit.json").contains("modulus_exponent"));

  std::ostringstream out, err;
  CHECK(run_cli({"census", "--config", cfg_path.string(), "--radius", "1.5", "--out", (dir / "empty").string()}, out,
                err) == kExitOk);
  CHECK(csv_rows(dir / "empty" / "census.csv") == 0);
  CHECK(err.str().find("warning") != std::string::npos);

  const RunConfig airy = parse_config_file(std::string(NEVDIM_SOURCE_DIR) + "/configs/airy.cfg");
  RunConfig a = airy;
  a.out_dir = (dir / "airy").string();
  CHECK(run({"census", "--config", write_config(dir, a).string()}) == kExitOk);
  const auto fit = read_json(dir / "airy" / "census_fit.json");
  CHECK(std::abs(fit["modulus_exponent"]["exponent"].get<double>() - 2.0 / 3.0) < 0.05);
}

TEST_CASE("dimension and synthetic commands") {
  const fs::path dir = scratch("dimension");
  RunConfig cfg;
  cfg.out_dir = (dir / "out").string();
  cfg.R_ladder = {1e2, 1e3};
  cfg.alphabet_sizes = {100, 1000};
  const fs::path cfg_path = write_config(dir, cfg);
  for (auto [m, expect] : {std::pair{0, 0.5}, std::pair{2, 2.0 / 3.0}}) {
    CHECK(run({"dimension", "--config", cfg_path.string(), "--synthetic", std::to_string(m)}) == kExitOk);
    const auto j = read_json(dir / "out" / "dimension.json");
    CHECK(j["theoretical"].get<double>() == doctest::Approx(expect).epsilon(1e-12));
    CHECK(j.contains("config"));
  }
  for (auto [m, expect] : {std::pair{0, 0.5}, std::pair{4, 0.75}}) {
    CHECK(run({"synthetic", "--config", cfg_path.string(), "--m", std::to_string(m)}) == kExitOk);
    const auto j = read_json(dir / "out" / "dimension.json");
    CHECK(j["theoretical"].get<double>() == doctest::Approx(expect).epsilon(1e-12));
    CHECK(std::abs(j["empirical_tail_exponent"]["value"].get<double>() - expect) < 1e-6);
    CHECK(fs::exists(dir / "out" / "synthetic_census.csv"));
  }
  const auto t0 = std::chrono::steady_clock::now();
  CHECK(run({"synthetic", "--config", cfg_path.string(), "--m", "1", "--j-max", "100000"}) == kExitOk);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 10.0);
  CHECK(csv_rows(dir / "out" / "synthetic_census.csv") == 100000);
}

TEST_CASE("tan end to end dimension") {
  const fs::path dir = scratch("tan_dimension");
  RunConfig cfg = parse_config_file(std::string(NEVDIM_SOURCE_DIR) + "/configs/tan.cfg");
  cfg.out_dir = (dir / "out").string();
  cfg.box_depth = 0;
  CHECK(run({"dimension", "--config", write_config(dir, cfg).string()}) == kExitOk);
  const auto j = read_json(dir / "out" / "dimension.json");
  CHECK(std::abs(j["empirical_tail_exponent"]["value"].get<double>() - 0.5) < 0.05);
}

TEST_CASE("PPM bytes") {
  EscapeRaster r;
  r.nx = 4;
  r.ny = 1;
  r.N = 2;
  r.classes = {OrbitClass::Dropped, OrbitClass::Dropped, OrbitClass::Stayed, OrbitClass::HitPole};
  r.steps = {0, 2, 2, 1};
  const std::string ppm = render_ppm(r);
  const std::string header = "P6\n4 1\n255\n";
  REQUIRE(ppm.size() == header.size() + 12);
  CHECK(ppm.substr(0, header.size()) == header);
  const unsigned char expect[12] = {40, 40, 40, 240, 240, 240, 255, 0, 0, 0, 0, 255};
  for (int i = 0; i < 12; ++i) CHECK(static_cast<unsigned char>(ppm[header.size() + i]) == expect[i]);
}

TEST_CASE("render command") {
  const fs::path dir = scratch("render");
  RunConfig cfg;
  cfg.census_radius = 20.0;
  SUBCASE("one pixel far from the poles is grey") {
    cfg.window = {0.3, 0.3, 0.2, 0.2};
    cfg.nx = cfg.ny = 1;
    cfg.out_dir = (dir / "one").string();
    CHECK(run({"render", "--config", write_config(dir, cfg).string()}) == kExitOk);
    const std::string ppm = slurp(dir / "one" / "render.ppm");
    REQUIRE(ppm.size() == std::string("P6\n1 1\n255\n").size() + 3);
    const auto* px = reinterpret_cast<const unsigned char*>(ppm.data() + ppm.size() - 3);
    CHECK(px[0] == px[1]);
    CHECK(px[1] == px[2]);
  }
  SUBCASE("a pixel on a pole is blue") {
    cfg.window = {2.5 * kPi, 2.5 * kPi, 0.0, 0.0};
    cfg.nx = cfg.ny = 1;
    cfg.render_R = 2.0;
    cfg.out_dir = (dir / "pole").string();
    CHECK(run({"render", "--config", write_config(dir, cfg).string()}) == kExitOk);
    const std::string ppm = slurp(dir / "pole" / "render.ppm");
    const auto* px = reinterpret_cast<const unsigned char*>(ppm.data() + ppm.size() - 3);
    CHECK(px[0] == 0);
    CHECK(px[1] == 0);
    CHECK(px[2] == 255);
  }
}

TEST_CASE("determinism") {
  const fs::path dir = scratch("determinism");
  RunConfig cfg = parse_config_file(std::string(NEVDIM_SOURCE_DIR) + "/configs/tan.cfg");
  cfg.census_radius = 50.0;
  cfg.box_depth = 0;
  for (const char* cmd : {"census", "dimension", "render", "verify"}) {
    std::vector<std::string> bytes;
    for (int rep = 0; rep < 2; ++rep) {
      RunConfig c = cfg;
      c.threads = rep == 0 ? 1 : 3;
      c.out_dir = (dir / (std::string(cmd) + std::to_string(rep))).string();
      const int code = run({cmd, "--config", write_config(dir, c).string()});
      CHECK(code == kExitOk);
      std::string all;
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(c.out_dir)) files.push_back(e.path());
      std::sort(files.begin(), files.end());
      for (const auto& p : files) {
        if (p.extension() == ".json") {
          // The config echo records the thread count; compare everything else.
          auto j = read_json(p);
          j.erase("config");
          all += p.filename().string() + j.dump();
        } else {
          all += p.filename().string() + slurp(p);
        }
      }
      bytes.push_back(all);
    }
    CHECK_MESSAGE(bytes[0] == bytes[1], cmd);
  }
}
