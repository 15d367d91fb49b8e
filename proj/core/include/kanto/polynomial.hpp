#pragma once

#include <string>
#include <vector>

namespace kanto {

// Polynomial in t with real coefficients, ascending order (coeffs[p] * t^p).
class Polynomial {
public:
    Polynomial() : coeffs_{0.0} {}
    explicit Polynomial(std::vector<double> coeffs);

    double operator()(double t) const;

    // exact \int_0^1 p(t) dt
    double integral01() const;

    // exact \int_a^b p(t) dt
    double integral(double a, double b) const;

    const std::vector<double>& coeffs() const { return coeffs_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

    std::string to_string() const;

    // Parses sums of monomials: "3*t^2-4*t", "t^3", "-0.5t+1", "2".
    // The '*' between coefficient and t is optional. Throws std::domain_error
    // on malformed input.
    static Polynomial parse(const std::string& text);

private:
    std::vector<double> coeffs_;
};

} // namespace kanto
