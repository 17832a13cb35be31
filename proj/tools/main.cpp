#include <iostream>
#include <vector>

#include "gcdeform/model.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gcdef::run_cli(args, std::cout, std::cerr);
}
