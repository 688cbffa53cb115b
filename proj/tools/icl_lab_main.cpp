#include <iostream>

#include "icl_lab/cli.hpp"

int main(int argc, char** argv) { return icl_lab::cli_main(argc, argv, std::cout, std::cerr); }
