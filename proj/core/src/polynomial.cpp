#include "kanto/polynomial.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace kanto {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double Polynomial::operator()(double t) const {
    double v = 0.0;
    for (std::size_t p = coeffs_.size(); p-- > 0;) v = v * t + coeffs_[p];
    return v;
}

double Polynomial::integral01() const {
    double s = 0.0;
    for (std::size_t p = 0; p < coeffs_.size(); ++p)
        s += coeffs_[p] / static_cast<double>(p + 1);
    return s;
}

double Polynomial::integral(double a, double b) const {
    double fa = 0.0, fb = 0.0;
    for (std::size_t p = coeffs_.size(); p-- > 0;) {
        const double c = coeffs_[p] / static_cast<double>(p + 1);
        fa = fa * a + c;
        fb = fb * b + c;
    }
    return fb * b - fa * a;
}

std::string Polynomial::to_string() const {
    std::string out;
    for (std::size_t p = coeffs_.size(); p-- > 0;) {
        const double c = coeffs_[p];
        if (c == 0.0 && coeffs_.size() > 1) continue;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", std::fabs(c));
        if (out.empty()) {
            if (c < 0) out += "-";
        } else {
            out += (c < 0) ? " - " : " + ";
        }
        const bool unit = std::fabs(c) == 1.0 && p > 0;
        if (!unit) out += buf;
        if (p > 0) {
            if (!unit) out += "*";
            out += "t";
            if (p > 1) out += "^" + std::to_string(p);
        }
    }
    if (out.empty()) out = "0";
    return out;
}

namespace {

struct Cursor {
    const std::string& s;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= s.size();
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
};

double parse_number(Cursor& c) {
    c.skip_ws();
    std::size_t read = 0;
    double v;
    try {
        v = std::stod(c.s.substr(c.pos), &read);
    } catch (const std::exception&) {
        throw std::domain_error("invalid polynomial: expected number at '" +
                                c.s.substr(c.pos) + "'");
    }
    c.pos += read;
    return v;
}

// term := [number ['*']] ['t' ['^' uint]]
void parse_term(Cursor& c, double sign, std::vector<double>& coeffs) {
    double coeff = sign;
    bool have_num = false;
    char ch = c.peek();
    if (ch == '.' || std::isdigit(static_cast<unsigned char>(ch))) {
        coeff *= parse_number(c);
        have_num = true;
        if (c.peek() == '*') ++c.pos;
    }
    int power = 0;
    if (c.peek() == 't' || c.peek() == 'T') {
        ++c.pos;
        power = 1;
        if (c.peek() == '^') {
            ++c.pos;
            const double p = parse_number(c);
            if (p < 0 || p != std::floor(p) || p > 64)
                throw std::domain_error("invalid polynomial: exponent must be an integer in [0,64]");
            power = static_cast<int>(p);
        }
    } else if (!have_num) {
        throw std::domain_error("invalid polynomial: expected term at '" +
                                c.s.substr(c.pos) + "'");
    }
    if (coeffs.size() < static_cast<std::size_t>(power + 1)) coeffs.resize(power + 1, 0.0);
    coeffs[power] += coeff;
}

} // namespace

Polynomial Polynomial::parse(const std::string& text) {
    Cursor c{text};
    std::vector<double> coeffs;
    if (c.done()) throw std::domain_error("invalid polynomial: empty input");
    double sign = 1.0;
    if (c.peek() == '+' || c.peek() == '-') {
        sign = (c.peek() == '-') ? -1.0 : 1.0;
        ++c.pos;
    }
    parse_term(c, sign, coeffs);
    while (!c.done()) {
        const char op = c.peek();
        if (op != '+' && op != '-')
            throw std::domain_error("invalid polynomial: expected '+' or '-' at '" +
                                    text.substr(c.pos) + "'");
        ++c.pos;
        parse_term(c, op == '-' ? -1.0 : 1.0, coeffs);
    }
    return Polynomial(std::move(coeffs));
}

} // namespace kanto
