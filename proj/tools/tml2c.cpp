#include "tml2/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return tml2::cli::run(argc, argv, std::cout, std::cerr); }
