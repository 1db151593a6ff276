#include "commands.hpp"

int main(int argc, char** argv) { return rtsched::cli::run(argc, argv); }
