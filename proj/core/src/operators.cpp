#include "kanto/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "kanto/errors.hpp"
#include "kanto/seqcore.hpp"

namespace kanto {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kExplicitCut = 256;   // cells handled term by term
constexpr double kNegligibleTail = 1e-18;

double xpow(double lnx, double n) {
    const double e = n * lnx;
    return e < -745.0 ? 0.0 : std::exp(e);
}

// L(N) = sum_{n>=N} x^n / n. Direct summation below N=256; above, the
// integral form E1(N mu) + x^N/(2N) + x^N(N mu + 1)/(12 N^2) with
// mu = -ln x (relative error below 1e-10 wherever the tail is nonzero).
double log_series_tail(double x, double N, double lnx) {
    if (N == kInf) return 0.0;
    const double mu = -lnx;
    if (N * mu > 745.0) return 0.0;
    if (N >= 256.0) {
        const double e1 = -std::expint(-N * mu);
        const double xn = std::exp(-N * mu);
        return e1 + xn / (2.0 * N) + xn * (N * mu + 1.0) / (12.0 * N * N);
    }
    double term = xpow(lnx, N);
    double acc = 0.0;
    for (double n = N; term > acc * 1e-21 || n == N; n += 1.0) {
        acc += term / n;
        term *= x;
        if (term == 0.0) break;
    }
    return acc;
}

// sum_{j=N0}^{N1-1} C(p+j-1,j) u^p x^j for p = 1,2,3 (N1 may be infinite)
double nb_partial(int p, double x, double u, double lnx, double N0, double N1) {
    auto piece = [&](double N) -> double {
        if (N == kInf) return 0.0;
        const double xn = xpow(lnx, N);
        if (xn == 0.0) return 0.0;
        const double nu = N * u;
        switch (p) {
            case 1: return xn;
            case 2: return xn * (nu + 1.0);
            default: return xn * (1.0 + nu + 0.5 * nu * (nu + u));  // p == 3
        }
    };
    return piece(N0) - piece(N1);
}

struct Strad {
    double a;  // alpha_j / Z
    double phiL, phiR;
    std::uint32_t segL, segR;
};

struct Run {
    std::uint32_t seg;
    double q0, qM;
};

struct PointPlan {
    bool identity = false;       // grid point 1
    std::vector<double> w;       // kanto: alpha_j/Z ; mkz: weight_j/Z
    std::vector<double> phi;     // kanto: cell endpoints (n+1); mkz: nodes (n)
    std::vector<std::uint32_t> seg;
    std::vector<Strad> strads;
    std::vector<Run> runs;
    std::size_t sbegin = 0, send = 0;  // i>=3 streamed tail
    double wbegin = 0.0;               // streamed weight at sbegin, already /Z
    std::uint32_t sseg = 0;
};

} // namespace

void OperatorSpec::validate() const {
    if (kind == Kind::Bernstein || kind == Kind::MKZ || kind == Kind::Kantorovich) {
        if (param < 1) throw std::domain_error("OperatorSpec: parameter must be >= 1");
    }
    if (kind == Kind::MKZ || kind == Kind::Kantorovich) {
        if (!(eps > 0.0 && eps <= 1e-2))
            throw std::domain_error("OperatorSpec: eps must lie in (0, 1e-2]");
    }
}

double apply_projection(const Observable& f, double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("apply_projection: x must lie in [0,1]");
    return f(0.0) * (1.0 - x) + f(1.0) * x;
}

std::vector<std::vector<double>> bernstein_node_matrix(int k) {
    if (k < 1) throw std::domain_error("bernstein_node_matrix: k must be >= 1");
    std::vector<std::vector<double>> mat(k + 1, std::vector<double>(k + 1, 0.0));
    mat[0][0] = 1.0;
    mat[k][k] = 1.0;
    for (int m = 1; m < k; ++m) {
        const double p = static_cast<double>(m) / k;
        const double lp = std::log(p), lq = std::log1p(-p);
        for (int j = 0; j <= k; ++j)
            mat[m][j] = std::exp(log_binomial(k, j) + j * lp + (k - j) * lq);
    }
    return mat;
}

double apply_bernstein(int k, const Observable& f, double x) {
    if (k < 1) throw std::domain_error("apply_bernstein: k must be >= 1");
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("apply_bernstein: x must lie in [0,1]");
    if (x == 0.0) return f(0.0);
    if (x == 1.0) return f(1.0);
    const double lp = std::log(x), lq = std::log1p(-x);
    double s = 0.0;
    for (int j = 0; j <= k; ++j)
        s += std::exp(log_binomial(k, j) + j * lp + (k - j) * lq) *
             f(static_cast<double>(j) / k);
    return s;
}

double apply_mkz(int i, const Observable& f, double x, double eps) {
    if (i < 1) throw std::domain_error("apply_mkz: i must be >= 1");
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("apply_mkz: x must lie in [0,1]");
    if (!(eps > 0.0 && eps <= 1e-2)) throw std::domain_error("apply_mkz: eps must lie in (0, 1e-2]");
    if (x == 1.0) return f(1.0);
    const std::size_t J = truncation_index(i + 1, x, eps);
    const std::vector<double> w = beta_weights(i + 1, x, J);
    double s = 0.0;
    for (std::size_t j = 0; j < J; ++j)
        s += w[j] * f(partition_point(i, j));
    return s;
}

std::vector<double> subinterval_integrals(const Observable& f, int i, std::size_t J,
                                          int quad_order) {
    if (i < 1) throw std::domain_error("subinterval_integrals: i must be >= 1");
    if (J < 1) throw std::domain_error("subinterval_integrals: J must be >= 1");
    if (quad_order < 2) throw std::domain_error("subinterval_integrals: quad_order must be >= 2");
    std::vector<double> out(J);
    for (std::size_t j = 0; j < J; ++j)
        out[j] = gauss_legendre(f, partition_point(i, j), partition_point(i, j + 1), quad_order);
    return out;
}

double apply_kantorovich(int i, const Observable& f, double x, double eps) {
    if (i < 1) throw std::domain_error("apply_kantorovich: i must be >= 1");
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("apply_kantorovich: x must lie in [0,1]");
    if (!(eps > 0.0 && eps <= 1e-2)) throw std::domain_error("apply_kantorovich: eps must lie in (0, 1e-2]");
    if (x == 1.0) return f(1.0);
    const std::size_t J = truncation_index(i, x, eps);
    const std::vector<double> a = alpha_weights(i, x, J);
    const std::vector<double> ints = subinterval_integrals(f, i, J, 4);
    double s = 0.0;
    for (std::size_t j = 0; j < J; ++j) s += a[j] * ints[j];
    return s;
}

// ---------------------------------------------------------------------------
// grid iteration engine

struct GridIterator::Impl {
    OperatorSpec spec;
    std::vector<double> grid;
    std::vector<PointPlan> plans;
    bool is_mkz = false;
    int i = 1;
    double eps = 1e-6;

    Impl(const OperatorSpec& s, std::vector<double> g) : spec(s), grid(std::move(g)) {
        spec.validate();
        if (spec.kind == OperatorSpec::Kind::Bernstein)
            throw std::domain_error("GridIterator: Bernstein uses the node-space path");
        if (grid.size() < 2 || grid.front() != 0.0 || grid.back() != 1.0)
            throw std::domain_error("GridIterator: grid must run from 0 to 1 with at least two points");
        for (std::size_t k = 0; k + 1 < grid.size(); ++k)
            if (!(grid[k] < grid[k + 1]))
                throw std::domain_error("GridIterator: grid must be strictly increasing");
        if (spec.kind == OperatorSpec::Kind::Projection) return;
        is_mkz = spec.kind == OperatorSpec::Kind::MKZ;
        i = spec.param;
        eps = spec.eps;
        if (eps < 1e-12)
            throw accuracy_error("GridIterator: eps below the 1e-12 resolution floor", 1e-12);
        plans.resize(grid.size());
        for (std::size_t p = 0; p + 1 < grid.size(); ++p) build_plan(p);
        plans.back().identity = true;
    }

    std::uint32_t segment_of(double t) const {
        std::size_t s = grid_segment(grid, t);
        if (s + 1 >= grid.size()) s = grid.size() - 2;  // t == 1 belongs to the last segment
        return static_cast<std::uint32_t>(s);
    }

    // smallest j >= lo with partition_point(i, j) >= g
    std::size_t first_cell_at(double g, std::size_t lo) const {
        if (g >= 1.0) return std::numeric_limits<std::size_t>::max();
        double est = std::ceil(i * g / (1.0 - g));
        std::size_t j = est < static_cast<double>(lo) ? lo : static_cast<std::size_t>(est);
        while (j > lo && partition_point(i, j - 1) >= g) --j;
        while (partition_point(i, j) < g) ++j;
        return j;
    }

    // largest j with partition_point(i, j) <= g
    std::size_t last_cell_at(double g, std::size_t lo) const {
        std::size_t j = first_cell_at(g, lo);
        if (j == std::numeric_limits<std::size_t>::max()) return j;
        if (partition_point(i, j) > g) {
            if (j == lo) throw std::domain_error("GridIterator: cell walk underflow");
            --j;
        }
        return j;
    }

    void build_plan(std::size_t p) {
        PointPlan& pl = plans[p];
        const double x = grid[p];
        const int wp = is_mkz ? i + 1 : i;  // weight-sequence parameter
        const double u = 1.0 - x;
        const double lnx = x > 0.0 ? std::log(x) : -kInf;

        const bool deep = beta_tail_bound(wp, x, kExplicitCut) > kNegligibleTail;
        const std::size_t nexp = deep ? kExplicitCut
                                      : std::min(kExplicitCut, truncation_index(wp, x, kNegligibleTail));

        const std::vector<double> betas = beta_weights(wp, x, nexp);
        double Z = 0.0;
        for (double b : betas) Z += b;

        // explicit geometry
        if (is_mkz) {
            pl.phi.resize(nexp);
            pl.seg.resize(nexp);
            for (std::size_t j = 0; j < nexp; ++j) {
                pl.phi[j] = partition_point(i, j);
                pl.seg[j] = segment_of(pl.phi[j]);
            }
        } else {
            pl.phi.resize(nexp + 1);
            pl.seg.resize(nexp + 1);
            for (std::size_t j = 0; j <= nexp; ++j) {
                pl.phi[j] = partition_point(i, j);
                pl.seg[j] = segment_of(pl.phi[j]);
            }
        }

        if (deep && i <= 2) {
            build_runs(pl, x, u, lnx, wp, nexp);
        } else if (deep) {
            // i >= 3: streamed truncated tail
            pl.sbegin = nexp;
            pl.send = std::max(truncation_index(wp, x, 0.5 * eps), nexp);
            pl.wbegin = betas.back() *
                        ((1.0 + static_cast<double>(wp - 1) / static_cast<double>(nexp)) * x);
            double bb = pl.wbegin;
            for (std::size_t j = pl.sbegin; j < pl.send; ++j) {
                Z += bb;
                bb *= (1.0 + static_cast<double>(wp - 1) / static_cast<double>(j + 1)) * x;
            }
            pl.sseg = segment_of(partition_point(i, pl.sbegin));
        }

        for (const Run& r : pl.runs) Z += r.q0;     // q0 holds raw S0 until normalized
        for (const Strad& s : pl.strads) Z += s.a;  // a holds raw beta until normalized

        if (i <= 2 || !deep) {
            if (std::fabs(Z - 1.0) > 1e-9)
                throw accuracy_error("GridIterator: weight normalization drifted", std::fabs(Z - 1.0));
        }

        // normalize; kanto converts cell masses to density coefficients
        pl.w.resize(nexp);
        for (std::size_t j = 0; j < nexp; ++j)
            pl.w[j] = is_mkz ? betas[j] / Z : betas[j] / (Z * cell_length(i, j));
        for (Strad& s : pl.strads) {
            const double len = s.phiR - s.phiL;
            s.a = s.a / (Z * len);
        }
        for (Run& r : pl.runs) {
            r.q0 /= Z;
            r.qM /= Z;
        }
        pl.wbegin /= Z;
    }

    // closed-form tail machinery, i in {1,2}; cells/nodes j >= nexp
    void build_runs(PointPlan& pl, double x, double u, double lnx, int wp, std::size_t nexp) {
        std::size_t j = nexp;
        std::uint32_t ss = segment_of(partition_point(i, j));
        for (;;) {
            const double gR = grid[ss + 1];
            if (gR >= 1.0) {
                emit_run(pl, x, u, lnx, wp, ss, static_cast<double>(j), kInf);
                break;
            }
            if (is_mkz) {
                if (partition_point(i, j) >= gR) {  // next node past this segment
                    ++ss;
                    continue;
                }
                const std::size_t jR = last_cell_at(gR, j);
                emit_run(pl, x, u, lnx, wp, ss, static_cast<double>(j),
                         static_cast<double>(jR + 1));
                j = jR + 1;
                ++ss;
                continue;
            }
            const std::size_t jR = last_cell_at(gR, j);
            if (jR > j)
                emit_run(pl, x, u, lnx, wp, ss, static_cast<double>(j), static_cast<double>(jR));
            j = jR;
            const double phiL = partition_point(i, j);
            const double phiR = partition_point(i, j + 1);
            if (phiL == gR) {
                ++ss;  // cell begins exactly on the boundary
                continue;
            }
            Strad s;
            s.phiL = phiL;
            s.phiR = phiR;
            s.segL = ss;
            s.segR = segment_of(phiR);
            s.a = std::exp(log_binomial(static_cast<std::int64_t>(wp + j) - 1,
                                        static_cast<std::int64_t>(j)) +
                           wp * std::log1p(-x) + static_cast<double>(j) * lnx);
            pl.strads.push_back(s);
            ss = s.segR;
            ++j;
        }
    }

    void emit_run(PointPlan& pl, double x, double u, double lnx, int wp,
                  std::uint32_t seg, double N0, double N1) {
        const double S0 = nb_partial(wp, x, u, lnx, N0, N1);
        if (S0 <= 0.0) return;
        double qM;
        if (is_mkz) {
            qM = u * nb_partial(i, x, u, lnx, N0, N1);
        } else if (i == 1) {
            const double si0 = (u / x) * (log_series_tail(x, N0 + 1, lnx) -
                                          log_series_tail(x, N1 == kInf ? kInf : N1 + 1, lnx));
            const double si1 = (u / (x * x)) * (log_series_tail(x, N0 + 2, lnx) -
                                                log_series_tail(x, N1 == kInf ? kInf : N1 + 2, lnx));
            qM = 0.5 * (si0 + si1);
        } else {  // i == 2
            const double geo = u * nb_partial(1, x, u, lnx, N0, N1);  // u^2 sum x^j
            const double l2 = log_series_tail(x, N0 + 2, lnx) -
                              log_series_tail(x, N1 == kInf ? kInf : N1 + 2, lnx);
            const double l3 = log_series_tail(x, N0 + 3, lnx) -
                              log_series_tail(x, N1 == kInf ? kInf : N1 + 3, lnx);
            const double si0 = geo - u * u / (x * x) * l2;
            const double si1 = geo - 2.0 * u * u / (x * x * x) * l3;
            qM = si0 + si1;  // i/2 == 1
        }
        pl.runs.push_back(Run{seg, S0, qM});
    }

    std::vector<double> step(const std::vector<double>& v) const {
        if (v.size() != grid.size())
            throw std::domain_error("GridIterator::step: value/grid length mismatch");
        const std::size_t G = grid.size();
        std::vector<double> out(G);

        if (spec.kind == OperatorSpec::Kind::Projection) {
            const double f0 = v.front(), f1 = v.back();
            for (std::size_t p = 0; p < G; ++p) out[p] = f0 * (1.0 - grid[p]) + f1 * grid[p];
            return out;
        }

        // prefix antiderivative and slopes of the piecewise-linear interpolant
        std::vector<double> F(G), slope(G - 1);
        F[0] = 0.0;
        for (std::size_t s = 0; s + 1 < G; ++s) {
            const double h = grid[s + 1] - grid[s];
            slope[s] = (v[s + 1] - v[s]) / h;
            F[s + 1] = F[s] + 0.5 * (v[s] + v[s + 1]) * h;
        }
        auto F_at = [&](double t, std::uint32_t s) {
            const double dt = t - grid[s];
            return F[s] + dt * (v[s] + 0.5 * slope[s] * dt);
        };
        auto val_at = [&](double t, std::uint32_t s) { return v[s] + slope[s] * (t - grid[s]); };

        for (std::size_t p = 0; p < G; ++p) {
            const PointPlan& pl = plans[p];
            if (pl.identity) {
                out[p] = v[p];
                continue;
            }
            double acc = 0.0;
            const std::size_t n = pl.w.size();
            if (is_mkz) {
                for (std::size_t j = 0; j < n; ++j)
                    acc += pl.w[j] * val_at(pl.phi[j], pl.seg[j]);
            } else {
                double Fl = F_at(pl.phi[0], pl.seg[0]);
                for (std::size_t j = 0; j < n; ++j) {
                    const double Fr = F_at(pl.phi[j + 1], pl.seg[j + 1]);
                    acc += pl.w[j] * (Fr - Fl);
                    Fl = Fr;
                }
                for (const Strad& s : pl.strads)
                    acc += s.a * (F_at(s.phiR, s.segR) - F_at(s.phiL, s.segL));
            }
            for (const Run& r : pl.runs) {
                const double b = slope[r.seg];
                const double apb = v[r.seg] + b * (1.0 - grid[r.seg]);
                acc += apb * r.q0 - b * r.qM;
            }
            if (pl.send > pl.sbegin) acc += stream_tail(pl, grid[p], F_at, val_at);
            out[p] = acc;
        }
        return out;
    }

    template <class FAt, class ValAt>
    double stream_tail(const PointPlan& pl, double x, const FAt& F_at, const ValAt& val_at) const {
        const int wp = is_mkz ? i + 1 : i;
        double w = pl.wbegin;
        std::uint32_t ss = pl.sseg;
        double acc = 0.0;
        double phiL = partition_point(i, pl.sbegin);
        for (std::size_t j = pl.sbegin; j < pl.send; ++j) {
            if (is_mkz) {
                while (grid[ss + 1] <= phiL && ss + 2 < static_cast<std::uint32_t>(grid.size())) ++ss;
                acc += w * val_at(phiL, ss);
                phiL = partition_point(i, j + 1);
            } else {
                const double phiR = partition_point(i, j + 1);
                while (grid[ss + 1] <= phiL && ss + 2 < static_cast<std::uint32_t>(grid.size())) ++ss;
                std::uint32_t sr = ss;
                while (grid[sr + 1] <= phiR && sr + 2 < static_cast<std::uint32_t>(grid.size())) ++sr;
                acc += w / (phiR - phiL) * (F_at(phiR, sr) - F_at(phiL, ss));
                phiL = phiR;
            }
            w *= (1.0 + static_cast<double>(wp - 1) / static_cast<double>(j + 1)) * x;
        }
        return acc;
    }
};

GridIterator::GridIterator(const OperatorSpec& spec, std::vector<double> grid)
    : impl_(new Impl(spec, std::move(grid))) {}
GridIterator::~GridIterator() { delete impl_; }
GridIterator::GridIterator(GridIterator&& o) noexcept : impl_(o.impl_) { o.impl_ = nullptr; }
GridIterator& GridIterator::operator=(GridIterator&& o) noexcept {
    std::swap(impl_, o.impl_);
    return *this;
}
const std::vector<double>& GridIterator::grid() const { return impl_->grid; }
std::vector<double> GridIterator::step(const std::vector<double>& values) const {
    return impl_->step(values);
}

// ---------------------------------------------------------------------------

GridFunction sample_on_grid(const Observable& f, std::vector<double> grid) {
    GridFunction g;
    g.grid = std::move(grid);
    g.values.resize(g.grid.size());
    for (std::size_t k = 0; k < g.grid.size(); ++k) g.values[k] = f(g.grid[k]);
    g.validate();
    return g;
}

std::vector<double> bernstein_iterate_nodes(int k, std::vector<double> node_values, int m) {
    if (static_cast<int>(node_values.size()) != k + 1)
        throw std::domain_error("bernstein_iterate_nodes: need k+1 node values");
    const auto mat = bernstein_node_matrix(k);
    std::vector<double> next(k + 1);
    for (int t = 0; t < m; ++t) {
        for (int r = 0; r <= k; ++r) {
            double s = 0.0;
            for (int j = 0; j <= k; ++j) s += mat[r][j] * node_values[j];
            next[r] = s;
        }
        node_values.swap(next);
    }
    return node_values;
}

double bernstein_eval_from_nodes(int k, const std::vector<double>& node_values, double x) {
    if (static_cast<int>(node_values.size()) != k + 1)
        throw std::domain_error("bernstein_eval_from_nodes: need k+1 node values");
    if (x == 0.0) return node_values.front();
    if (x == 1.0) return node_values.back();
    const double lp = std::log(x), lq = std::log1p(-x);
    double s = 0.0;
    for (int j = 0; j <= k; ++j)
        s += std::exp(log_binomial(k, j) + j * lp + (k - j) * lq) * node_values[j];
    return s;
}

namespace {

GridFunction iterate_impl(const OperatorSpec& spec, GridFunction f, int m, bool cesaro) {
    spec.validate();
    if (m < 1) throw std::domain_error("iterate: m must be >= 1");
    f.validate();
    const std::size_t G = f.grid.size();

    if (spec.kind == OperatorSpec::Kind::Bernstein) {
        const int k = spec.param;
        std::vector<double> nodes(k + 1);
        for (int j = 0; j <= k; ++j)
            nodes[j] = pl_interpolate(f.grid, f.values, static_cast<double>(j) / k);
        GridFunction out;
        out.grid = f.grid;
        out.values.assign(G, 0.0);
        if (!cesaro) {
            const auto nv = bernstein_iterate_nodes(k, nodes, m - 1);
            for (std::size_t p = 0; p < G; ++p)
                out.values[p] = bernstein_eval_from_nodes(k, nv, f.grid[p]);
            return out;
        }
        std::vector<double> acc = f.values;  // T^0 term
        auto nv = nodes;
        for (int t = 1; t < m; ++t) {
            for (std::size_t p = 0; p < G; ++p)
                acc[p] += bernstein_eval_from_nodes(k, nv, f.grid[p]);
            nv = bernstein_iterate_nodes(k, nv, 1);
        }
        for (std::size_t p = 0; p < G; ++p) out.values[p] = acc[p] / m;
        return out;
    }

    GridIterator it(spec, f.grid);
    if (!cesaro) {
        std::vector<double> v = f.values;
        if (spec.kind == OperatorSpec::Kind::Projection) {
            v = it.step(v);  // T^m = T
        } else {
            for (int t = 0; t < m; ++t) v = it.step(v);
        }
        GridFunction out;
        out.grid = std::move(f.grid);
        out.values = std::move(v);
        return out;
    }
    std::vector<double> acc = f.values;
    std::vector<double> cur = f.values;
    for (int t = 1; t < m; ++t) {
        cur = it.step(cur);
        for (std::size_t p = 0; p < G; ++p) acc[p] += cur[p];
    }
    for (double& a : acc) a /= m;
    GridFunction out;
    out.grid = std::move(f.grid);
    out.values = std::move(acc);
    return out;
}

} // namespace

GridFunction iterate_on_grid(const OperatorSpec& spec, const GridFunction& f, int m) {
    return iterate_impl(spec, f, m, false);
}

GridFunction iterate_on_grid(const OperatorSpec& spec, const Observable& f, int m) {
    const int i = (spec.kind == OperatorSpec::Kind::MKZ ||
                   spec.kind == OperatorSpec::Kind::Kantorovich)
                      ? spec.param
                      : 1;
    return iterate_impl(spec, sample_on_grid(f, standard_grid(i)), m, false);
}

GridFunction cesaro_on_grid(const OperatorSpec& spec, const GridFunction& f, int m) {
    return iterate_impl(spec, f, m, true);
}

GridFunction cesaro_on_grid(const OperatorSpec& spec, const Observable& f, int m) {
    const int i = (spec.kind == OperatorSpec::Kind::MKZ ||
                   spec.kind == OperatorSpec::Kind::Kantorovich)
                      ? spec.param
                      : 1;
    return iterate_impl(spec, sample_on_grid(f, standard_grid(i)), m, true);
}

} // namespace kanto
