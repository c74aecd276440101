#include <iostream>

#include "liesig/cli.hpp"

int main(int argc, char** argv) { return liesig::cli::run(argc, argv, std::cin, std::cout, std::cerr); }
