#include <iostream>

#include "tou/cli.hpp"

int main(int argc, char** argv) { return tou::run_cli(argc, argv, std::cout, std::cerr); }
