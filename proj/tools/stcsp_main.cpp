#include <iostream>
#include <string>
#include <vector>

#include "stcsp/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return stcsp::cli::run(args, std::cout, std::cerr);
}
