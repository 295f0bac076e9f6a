#include <iostream>

#include "fracstokes/commands.hpp"

int main(int argc, char** argv) { return fracstokes::cli::run(argc, argv, std::cout, std::cerr); }
