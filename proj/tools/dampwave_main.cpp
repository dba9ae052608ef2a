#include <iostream>
#include <string>
#include <vector>

#include "dampwave/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    return dampwave::run_cli(args, std::cout, std::cerr);
}
