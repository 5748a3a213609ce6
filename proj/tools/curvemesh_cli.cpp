#include "curvemesh/cli.hpp"

int main(int argc, char** argv) { return curvemesh::cli::run_cli(argc, argv); }
