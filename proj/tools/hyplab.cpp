#include <iostream>

#include "hyplab/cli.hpp"

int main(int argc, char** argv) { return hyplab::cli::run(argc, argv, std::cout, std::cerr); }
