#include "switchgrid/cli.hpp"

int main(int argc, char** argv) { return switchgrid::cli::run(argc, argv); }
