#include "inkflux/cli.hpp"

int main(int argc, char** argv) { return inkflux::cli::run_command(argc, argv); }
