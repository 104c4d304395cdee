#include <iostream>

#include "riesz/run.hpp"

int main(int argc, char** argv) { return riesz::cli_main(argc, argv, std::cout, std::cerr); }
