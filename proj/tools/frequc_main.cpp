#include "frequc/cli.hpp"

int main(int argc, char** argv) { return frequc::cli::main(argc, argv); }
