#include "sdcheck/cli.hpp"

int main(int argc, char** argv) { return sdcheck::cli::main_entry(argc, argv); }
