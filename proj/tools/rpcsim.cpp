#include <iostream>

#include "rpc/cli.hpp"

int main(int argc, char** argv) { return rpc::cli::run(argc, argv, std::cout, std::cerr); }
