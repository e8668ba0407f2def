#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return udnet::cli::run(argc, argv, std::cout, std::cerr); }
