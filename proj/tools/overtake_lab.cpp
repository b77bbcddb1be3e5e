#include "overtake/cli.hpp"

int main(int argc, char** argv) { return overtake::dispatch(argc, argv); }
