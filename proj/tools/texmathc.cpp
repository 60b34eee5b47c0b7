#include "texmath/cli.hpp"

int main(int argc, char** argv) { return texmath::cli::run(argc, argv); }
