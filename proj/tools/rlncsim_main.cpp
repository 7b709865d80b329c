#include "rlncsim/cli.hpp"

int main(int argc, char** argv) { return rlncsim::cli::run(argc, argv); }
