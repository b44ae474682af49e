#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return kickrot::cli::parse_and_dispatch(argc, argv, std::cout, std::cerr); }
