#include "fsupart/cli.hpp"

int main(int argc, char** argv) { return fsupart::cli::main(argc, argv); }
