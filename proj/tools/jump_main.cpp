#include "jump/cli.hpp"

int main(int argc, char** argv) { return jump::run_cli(argc, argv); }
