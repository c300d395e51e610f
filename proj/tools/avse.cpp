#include "avse/cli.hpp"

int main(int argc, char** argv) { return avse::run_cli(argc, argv); }
