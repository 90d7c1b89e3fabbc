#include <iostream>

#include "sumdca_cli/cli.hpp"

int main(int argc, char** argv) { return sumdca::cli::run(argc, argv, std::cout, std::cerr); }
