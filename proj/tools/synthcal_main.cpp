#include "synthcal/cli.hpp"

int main(int argc, char** argv) { return synthcal::cli::run(argc, argv); }
