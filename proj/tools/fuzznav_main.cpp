#include <iostream>

#include "fuzznav/cli.hpp"

int main(int argc, char** argv) { return fuzznav::cli::run_cli(argc, argv, std::cout, std::cerr); }
