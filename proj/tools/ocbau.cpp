#include <string>
#include <vector>

#include "ocbau/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ocbau::cli::run(std::move(args));
}
