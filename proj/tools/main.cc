#include "cli.h"

int main(int argc, char** argv) { return npdmd::cli::run(argc, argv); }
