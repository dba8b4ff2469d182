#include "qreach/cli.hpp"

int main(int argc, char** argv) { return qreach::cli::run(argc, argv); }
