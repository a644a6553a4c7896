#include "adaptcd/cli.hpp"

int main(int argc, char** argv) { return adaptcd::cli::main(argc, argv); }
