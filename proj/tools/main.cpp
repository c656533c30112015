#include "blidkit/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return blidkit::cli::run(argc, argv, std::cout, std::cerr); }
