#include <iostream>

#include "unbiased/cli.hpp"

int main(int argc, char** argv) { return unbiased::run_cli(argc, argv, std::cout, std::cerr); }
