#include "worldfn/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return worldfn::cli::run(argc, argv, std::cout, std::cerr); }
