#include <iostream>

#include "tpinv/cli.hpp"

int main(int argc, char** argv) { return tpinv::cli::run(argc, argv, std::cout, std::cerr); }
