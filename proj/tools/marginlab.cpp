#include "marginlab/harness/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return marginlab::run_cli(argc, argv, std::cout, std::cerr); }
