#include "qnash/cli.hpp"

int main(int argc, char** argv) { return qnash::run_cli(argc, argv); }
