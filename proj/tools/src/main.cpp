#include <iostream>

#include "bellman_cli/commands.hpp"

int main(int argc, char** argv) { return bellman::cli::cli_dispatch(argc, argv, std::cout, std::cerr); }
