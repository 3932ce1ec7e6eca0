#include <vector>

#include "lattice_smooth/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return latsm::cli_main(args);
}
