#include <iostream>

#include "hsto/cli.hpp"

int main(int argc, char** argv) {
    return hsto::run_cli(argc, argv, std::cout, std::cerr);
}
