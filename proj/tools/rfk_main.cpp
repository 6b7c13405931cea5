#include "rfk/harness.hpp"

int main(int argc, char** argv) { return rfk::harness::main_entry(argc, argv); }
