#pragma once

#include <stdexcept>
#include <string>

namespace kanto {

// Requested tolerance could not be met. Carries the bound that was achieved
// so callers can decide whether to retry with a looser request.
class accuracy_error : public std::runtime_error {
public:
    accuracy_error(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_bound(achieved) {}

    double achieved_bound;
};

} // namespace kanto
