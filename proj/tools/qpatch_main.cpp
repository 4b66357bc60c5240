#include <iostream>

#include "qpatch/harness.hpp"

int main(int argc, char** argv) {
    return qpatch::harness::run_cli(argc, argv, std::cout, std::cerr);
}
