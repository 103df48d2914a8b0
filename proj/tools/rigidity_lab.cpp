#include "rigidity/cli.hpp"

int main(int argc, char** argv) { return rigidity::cli::main(argc, argv); }
