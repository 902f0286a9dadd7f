#include "lextree/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return lextree::cli::run(argc, argv, std::cin, std::cout, std::cerr); }
