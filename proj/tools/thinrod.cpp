#include <string>
#include <vector>

#include "thinrod/cli.hpp"

int main(int argc, char** argv) {
    return thinrod::run_cli(std::vector<std::string>(argv, argv + argc));
}
