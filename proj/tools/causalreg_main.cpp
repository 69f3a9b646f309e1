#include "causalreg/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return causalreg::run_cli(argc, argv, std::cout, std::cerr);
}
