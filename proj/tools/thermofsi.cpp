#include "thermofsi/cli.hpp"

int main(int argc, char** argv) { return thermofsi::run_cli(argc, argv); }
