#include <iostream>

#include "eklab/cli.hpp"

int main(int argc, char** argv) { return eklab::run_cli(argc, argv, std::cout, std::cerr); }
