#include <iostream>

#include "ftn/commands.hpp"

int main(int argc, char** argv) { return ftn::run_cli(argc, argv, std::cout, std::cerr); }
