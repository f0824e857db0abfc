#include <iostream>

#include "qmetric/cli.hpp"

int main(int argc, char** argv) { return qmetric::cli::main(argc, argv, std::cout, std::cerr); }
