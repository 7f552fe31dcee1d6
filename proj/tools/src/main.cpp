#include "roughldp/cli/run.hpp"

#include <iostream>

int main(int argc, char** argv) { return roughldp::cli::run(argc, argv, std::cout, std::cerr); }
