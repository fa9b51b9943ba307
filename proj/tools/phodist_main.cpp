#include <phodist/cli.hpp>

int main(int argc, char** argv) { return phodist::cli::main_entry(argc, argv); }
