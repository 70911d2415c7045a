#include "transnet/cli.hpp"

int main(int argc, char** argv) { return transnet::cli::main(argc, argv); }
