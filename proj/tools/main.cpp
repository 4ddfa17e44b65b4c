#include "aoisim/cli.hpp"

int main(int argc, char** argv) {
    return aoisim::cli::run(argc, argv);
}
