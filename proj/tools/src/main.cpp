#include <iostream>

#include "nevsim/cli.hpp"

int main(int argc, char** argv) { return nevsim::cli::run(argc, argv, std::cout, std::cerr); }
