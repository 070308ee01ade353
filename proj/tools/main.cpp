#include <iostream>

#include "qrecycle/cli.hpp"

int main(int argc, char** argv) { return qrecycle::cli::run(argc, argv, std::cout, std::cerr); }
