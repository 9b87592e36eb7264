#include "eolink/cli.hpp"

int main(int argc, char** argv) { return eolink::cli::main_entry(argc, argv); }
