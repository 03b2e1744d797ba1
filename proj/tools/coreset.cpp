#include "coreset/cli.hpp"

int main(int argc, char** argv) { return coreset::cli::main_entry(argc, argv); }
