// main.cpp — executable entry point
#include "ptwalk/cli.hpp"

int main(int argc, char** argv) { return ptwalk::run_cli(argc, argv); }
