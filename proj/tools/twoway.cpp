#include "twoway/cli.hpp"

int main(int argc, char** argv) { return twoway::cli::main(argc, argv); }
