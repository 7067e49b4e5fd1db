#include "nevdim/cli.hpp"

int main(int argc, char** argv) { return nevdim::run_cli(argc, argv); }
