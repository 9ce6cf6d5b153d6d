#include "sphflow/cli.hpp"

int main(int argc, char** argv) { return sphflow::run_cli(argc, argv); }
