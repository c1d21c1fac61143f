#include <iostream>

#include "matchdist/cli.hpp"

int main(int argc, char** argv) {
    return matchdist::cli::run(argc, argv, std::cout, std::cerr);
}
