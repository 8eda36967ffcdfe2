#include <iostream>

#include "metaseg/cli.hpp"

int main(int argc, char** argv) { return metaseg::cli_main(argc, argv, std::cout, std::cerr); }
