#include "cli.hpp"

int main(int argc, char** argv) { return wfared::cli::run(argc, argv); }
