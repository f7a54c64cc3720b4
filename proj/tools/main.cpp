#include "modsynth/cli.hpp"

int main(int argc, char** argv) { return modsynth::run_cli(argc, argv); }
