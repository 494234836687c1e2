#include <iostream>

#include "rvlab/cli.hpp"

int main(int argc, char** argv) { return rvlab::cli::run(argc, argv, std::cout, std::cerr); }
