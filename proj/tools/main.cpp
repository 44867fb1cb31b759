#include "cli.hpp"

int main(int argc, char** argv) { return planrec::cli::run(argc, argv); }
