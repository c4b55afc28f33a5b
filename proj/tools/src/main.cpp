#include "crlab/tools/commands.hpp"

int main(int argc, char** argv) { return crlab::tools::run_cli(argc, argv); }
