#include "nlh/cli.hpp"

int main(int argc, char** argv) { return nlh::cli::main_entry(argc, argv); }
