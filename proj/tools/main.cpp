#include "gaps/cli.hpp"

int main(int argc, char** argv) { return gaps::run_cli(argc, argv); }
