#include "coldpack/cli.hpp"

int main(int argc, char** argv) { return coldpack::cli::run_cli(argc, argv); }
