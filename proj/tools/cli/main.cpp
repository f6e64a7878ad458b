#include "cli.hpp"

int main(int argc, char** argv) { return midas::cli::main(argc, argv); }
