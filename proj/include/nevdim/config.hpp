#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nevdim/core_math.hpp"
#include "nevdim/dimension.hpp"
#include "nevdim/nevanlinna.hpp"

namespace nevdim {

/// Everything one run needs. Text form: `[section]` headers and
/// `key = value` lines; lists are whitespace-separated, complex numbers are
/// "re im" pairs, `#` starts a comment.
struct RunConfig {
  // [function]
  std::string name = "tan";
  std::vector<cplx> poly{1.0};  // ascending powers
  std::array<cplx, 4> moebius{0.0, 1.0, 1.0, 0.0};
  cplx z0 = 0.0;
  double tol = 1e-12;
  // [census]
  double census_radius = 200.0;
  bool allow_incomplete = false;
  // [dimension]
  double R = 10.0;
  std::vector<double> R_ladder{100.0};
  std::vector<int> alphabet_sizes{10, 30, 100};
  double C = kDefaultC;
  double C1 = kDefaultC1;
  int box_depth = 0;
  int box_symbols = 30;
  double box_R = 10.0;
  // [render]
  Window window{30.0, 40.0, -1.0, 1.0};
  int nx = 64;
  int ny = 16;
  int N = 3;
  double render_R = 10.0;
  // [synthetic]
  int synthetic_m = 0;
  double c_mod = 1.0;
  double c_res = 1.0;
  int synthetic_j_max = 0;  // 0 sizes the CSV to the estimator window
  // [verify]
  int verify_samples = 16;
  double schwarzian_h = 0.05;
  // [run]
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int threads = 1;

  bool operator==(const RunConfig& o) const;
};

RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);
std::string emit_config(const RunConfig& cfg);
/// Throws ConfigError on non-positive radii, a degenerate Moebius map and
/// similar violations.
void validate(const RunConfig& cfg);

NevanlinnaSpec to_spec(const RunConfig& cfg);
DimensionOptions to_dimension_options(const RunConfig& cfg);

}  // namespace nevdim
