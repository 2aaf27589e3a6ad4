#include <iostream>

#include "snnbench/commands.hpp"

int main(int argc, char** argv) {
    return snn::cli::run_cli(argc, argv, std::cout, std::cerr);
}
