#include "hyperlap/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return hyperlap::cli::run(argc, argv, std::cout, std::cerr);
}
