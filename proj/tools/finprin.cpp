#include <iostream>

#include "finprin/cli.hpp"

int main(int argc, char** argv) { return finprin::run_cli(argc, argv, std::cin, std::cout, std::cerr); }
