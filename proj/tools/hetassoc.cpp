#include "hetassoc/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
  return hetassoc::run_cli(argc, argv, std::cin, std::cout, std::cerr);
}
