#include <iostream>

#include "orbita/cli.hpp"

int main(int argc, char** argv) { return orbita::cli::run(argc, argv, std::cout, std::cerr); }
