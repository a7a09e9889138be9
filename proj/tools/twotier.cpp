#include <iostream>
#include <string>
#include <vector>

#include "twotier/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return twotier::cli::run(args, std::cout, std::cerr);
}
