#include "commands.hpp"

int main(int argc, char** argv) { return msreg::cli::run(argc, argv); }
