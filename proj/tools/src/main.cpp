#include <iostream>

#include "moebius_cli/cli.hpp"

int main(int argc, char** argv) { return moebius::cli::run(argc, argv, std::cout, std::cerr); }
