#include "waggle/cli.hpp"

int main(int argc, char** argv) { return waggle::cli::run(argc, argv); }
