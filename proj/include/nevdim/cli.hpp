#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nevdim/config.hpp"
#include "nevdim/dimension.hpp"

namespace nevdim {

enum ExitCode : int { kExitOk = 0, kExitVerifyFailed = 1, kExitConfig = 2, kExitRuntime = 3 };

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

/// Binary P6 image: dropped at step k -> grey 40 + 200k/N, stayed -> red,
/// hit-pole -> blue, undefined -> green.
std::string render_ppm(const EscapeRaster& raster);

}  // namespace nevdim
