#include "xsdp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return xsdp::cli::run(argc, argv, std::cout, std::cerr); }
