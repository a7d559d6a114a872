#include <iostream>

#include "ldes/cli.hpp"

int main(int argc, char** argv) { return ldes::cli_main(argc, argv, std::cout, std::cerr); }
