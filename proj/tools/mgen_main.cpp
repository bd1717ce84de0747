#include "mgen/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return mgen::cli::run(argc, argv, std::cout, std::cerr); }
