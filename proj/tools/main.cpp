#include <expanal/cli.hpp>

int main(int argc, char** argv) { return expanal::cli::main(argc, argv); }
