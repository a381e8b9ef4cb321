// Entry point for the odesc command-line tool.
#include "odesc/cli.hpp"

int main(int argc, char** argv) { return odesc::run_cli(argc, argv); }
