#include "vrf/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return vrf::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
