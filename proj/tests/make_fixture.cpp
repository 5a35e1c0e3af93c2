#include "fixture.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: make_fixture DIR [SEED]\n";
        return 1;
    }
    const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 20171218;
    fixture::write_cme_fixture(argv[1], seed);
    return 0;
}
