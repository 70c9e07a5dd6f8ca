#include "evotree/cli.hpp"

int main(int argc, char** argv) { return evotree::run_cli(argc, argv); }
