#include <iostream>

#include "hybridcap/cli.hpp"

int main(int argc, char** argv) { return hybridcap::cli::main_entry(argc, argv, std::cout, std::cerr); }
