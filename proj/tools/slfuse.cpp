#include <iostream>

#include "sl/cli.hpp"

int main(int argc, char** argv) { return sl::cli::run(argc, argv, std::cout, std::cerr); }
