#include "liftpde/cli.hpp"

int main(int argc, char** argv) { return liftpde::main_entry(argc, argv); }
