#include "ksos/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return ksos::run_cli(argc, argv, std::cout, std::cerr); }
