#include "supersat/cli.hpp"

int main(int argc, char** argv) { return supersat::cli::cli_main(argc, argv); }
