#include <iostream>
#include <string>
#include <vector>

#include "pubtrend/study.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    pubtrend::RunContext context{std::cout, std::cerr};
    return pubtrend::run_command(args, pubtrend::process_environment(), context);
}
