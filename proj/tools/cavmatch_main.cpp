#include "cavmatch/commands.hpp"

int main(int argc, char** argv) { return cavmatch::run_cli(argc, argv); }
