#include <iostream>

#include "spinthermo_cli/cli.hpp"

int main(int argc, char** argv) { return spinthermo::cli::run(argc, argv, std::cout, std::cerr); }
