#include "vprisk_cli/app.hpp"

#include <iostream>

int main(int argc, char** argv) { return vprisk::cli::run_app(argc, argv, std::cout, std::cerr); }
