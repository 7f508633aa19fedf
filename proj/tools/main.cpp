#include <iostream>
#include <string>
#include <vector>

#include "compoisson/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return compoisson::cli::run_command(std::move(args), std::cout);
}
