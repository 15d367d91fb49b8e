#include "kanto/selfcheck.hpp"

#include <iostream>

int main() {
    auto results = kanto::run_acceptance(std::cout);
    return kanto::all_passed(results) ? 0 : 1;
}
