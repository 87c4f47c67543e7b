#include "dcp/cli.hpp"

int main(int argc, char** argv) { return dcp::cli::run_cli(argc, argv); }
