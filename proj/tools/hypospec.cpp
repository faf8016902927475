#include <iostream>

#include "hypo/cli.hpp"

int main(int argc, char** argv) { return hypo::cli::run(argc, argv, std::cout, std::cerr); }
