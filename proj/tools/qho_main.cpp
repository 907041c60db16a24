#include "qho_cli.hpp"

int main(int argc, char** argv) { return qho::cli::run_cli(argc, argv); }
