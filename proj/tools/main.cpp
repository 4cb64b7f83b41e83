#include <iostream>

#include "mswlab/cli.hpp"

int main(int argc, char** argv) { return mswlab::run_cli(argc, argv, std::cout, std::cerr); }
