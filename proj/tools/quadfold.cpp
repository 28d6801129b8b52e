#include <iostream>

#include "quadfold/cli.hpp"

int main(int argc, char** argv)
{
    return quadfold::run_cli(argc, argv, std::cout, std::cerr);
}
