#include <string>
#include <vector>

#include "vmc/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return vmc::cli::run(std::move(args));
}
