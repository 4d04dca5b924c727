#include <string>
#include <vector>

#include "fracmv/cli/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return fracmv::cli::run(args);
}
