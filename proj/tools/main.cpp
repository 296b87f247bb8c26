#include "fracspde/cli.hpp"

int main(int argc, char **argv) { return fracspde::cli_main(argc, argv); }
