#include "vhs/cli.hpp"

int main(int argc, char** argv) { return vhs::cli::run(argc, argv); }
