#include <iostream>

#include "bandgap_qed/cli.hpp"

int main(int argc, char** argv) { return bgq::cli::main_entry(argc, argv, std::cout, std::cerr); }
