#include "crashrobust/cli.hpp"

int main(int argc, char** argv) { return crashrobust::run_command(argc, argv); }
