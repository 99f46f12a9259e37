#include <iostream>
#include <string>
#include <vector>

#include "sparsegof/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return sparsegof::cli::run(args, std::cout, std::cerr);
}
