#include <iostream>
#include <vector>

#include "magq/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return magq::cli::run(std::move(args), std::cout, std::cerr);
}
