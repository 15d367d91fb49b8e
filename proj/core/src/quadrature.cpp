#include "kanto/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "kanto/errors.hpp"

namespace kanto {

namespace {

// nodes (nonnegative half) and weights on [-1,1], symmetric rules
struct GLRule {
    const double* x;
    const double* w;
    int half;       // number of stored node magnitudes
    bool has_zero;
};

const double x1[] = {0.0};
const double w1[] = {2.0};
const double x2[] = {0.5773502691896257645};
const double w2[] = {1.0};
const double x3[] = {0.0, 0.7745966692414833770};
const double w3[] = {0.8888888888888888889, 0.5555555555555555556};
const double x4[] = {0.3399810435848562648, 0.8611363115940525752};
const double w4[] = {0.6521451548625461426, 0.3478548451374538574};
const double x5[] = {0.0, 0.5384693101056830910, 0.9061798459386639928};
const double w5[] = {0.5688888888888888889, 0.4786286704993664680, 0.2369268850561890875};
const double x6[] = {0.2386191860831969086, 0.6612093864662645137, 0.9324695142031520278};
const double w6[] = {0.4679139345726910474, 0.3607615730481386076, 0.1713244923791703450};
const double x7[] = {0.0, 0.4058451513773971669, 0.7415311855993944399, 0.9491079123427585245};
const double w7[] = {0.4179591836734693878, 0.3818300505051189449, 0.2797053914892766679, 0.1294849661688696933};
const double x8[] = {0.1834346424956498049, 0.5255324099163289858, 0.7966664774136267395, 0.9602898564975362317};
const double w8[] = {0.3626837833783619830, 0.3137066458778872873, 0.2223810344533744705, 0.1012285362903762592};

GLRule rule_for(int n) {
    switch (n) {
        case 1: return {x1, w1, 1, true};
        case 2: return {x2, w2, 1, false};
        case 3: return {x3, w3, 2, true};
        case 4: return {x4, w4, 2, false};
        case 5: return {x5, w5, 3, true};
        case 6: return {x6, w6, 3, false};
        case 7: return {x7, w7, 4, true};
        case 8: return {x8, w8, 4, false};
        default: throw std::domain_error("gauss_legendre: order must be in [1,8]");
    }
}

double simpson(const Observable& f, double a, double m, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_rec(const Observable& f, double a, double m, double b,
                    double fa, double fm, double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, lm, m, fa, flm, fm);
    const double right = simpson(f, m, rm, b, fm, frm, fb);
    const double err = (left + right - whole) / 15.0;
    if (std::fabs(err) <= tol || (b - a) < 1e-14) {
        if (std::fabs(err) > tol)
            throw accuracy_error("adaptive_simpson: interval width exhausted", std::fabs(err));
        return left + right + err;
    }
    if (depth > 60)
        throw accuracy_error("adaptive_simpson: recursion depth exhausted", std::fabs(err));
    return adaptive_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           adaptive_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

} // namespace

double gauss_legendre(const Observable& f, double a, double b, int n) {
    const GLRule r = rule_for(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    int k = 0;
    if (r.has_zero) {
        s += r.w[0] * f(c);
        k = 1;
    }
    for (; k < r.half; ++k)
        s += r.w[k] * (f(c - h * r.x[k]) + f(c + h * r.x[k]));
    return s * h;
}

double adaptive_simpson(const Observable& f, double a, double b, double tol) {
    if (!(tol > 0)) throw std::domain_error("adaptive_simpson: tol must be positive");
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = simpson(f, a, m, b, fa, fm, fb);
    return adaptive_rec(f, a, m, b, fa, fm, fb, whole, tol, 0);
}

} // namespace kanto
