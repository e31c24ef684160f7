#include <iostream>

#include "martta/cli.hpp"

int main(int argc, char** argv) { return martta::cli_run(argc, argv, std::cout, std::cerr); }
