#include "fastreact/commands.hpp"

int main(int argc, char** argv) { return fastreact::cli_main(argc, argv); }
