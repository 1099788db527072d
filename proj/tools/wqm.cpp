#include "wqm/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return wqm::cli::main({argv, argv + argc}, std::cout, std::cerr);
}
