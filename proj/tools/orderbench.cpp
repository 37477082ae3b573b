#include "orderbench/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return orderbench::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
