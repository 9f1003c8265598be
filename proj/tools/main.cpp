#include <iostream>

#include "srcorr/cli.hpp"

int main(int argc, char** argv) { return srcorr::cli::run(argc, argv, std::cout, std::cerr); }
