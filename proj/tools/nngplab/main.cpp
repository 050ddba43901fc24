#include "app.hpp"

int main(int argc, char** argv) { return nngp::app::main_entry(argc, argv); }
