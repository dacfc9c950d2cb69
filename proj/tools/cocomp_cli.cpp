#include "cocomp/sim/cli.hpp"

int main(int argc, char** argv) { return cocomp::cli::run(argc, argv); }
