#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "kanto/analysis.hpp"
#include "kanto/discsim.hpp"
#include "kanto/errors.hpp"
#include "kanto/io.hpp"
#include "kanto/measures.hpp"
#include "kanto/operators.hpp"
#include "kanto/selfcheck.hpp"
#include "kanto/seqcore.hpp"

using namespace kanto;

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);  // \n only, byte-stable across platforms
    if (!os) throw std::domain_error("cannot open output file: " + path);
    return os;
}

std::string default_out(const std::string& name) { return io::output_dir() + "/" + name; }

OperatorSpec::Kind parse_kind(const std::string& s) {
    if (s == "kantorovich") return OperatorSpec::Kind::Kantorovich;
    if (s == "mkz") return OperatorSpec::Kind::MKZ;
    if (s == "bernstein") return OperatorSpec::Kind::Bernstein;
    if (s == "projection") return OperatorSpec::Kind::Projection;
    throw std::domain_error("unknown operator kind: " + s);
}

struct Args {
    std::string op = "kantorovich";
    int i = 1;
    int k = 2;
    std::string f = "t^2";
    int m = 500;
    double tol = 1e-2;
    double eps = 1e-6;
    double x = 0.5;
    std::vector<double> xs;
    std::size_t J = 200;
    int quad = 64;
    std::size_t n = 100000;
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;
    double z_re = 0.0, z_im = 0.0;
    std::string out;
    std::string avg_out;
    std::vector<int> only;
    bool gamma = false;
};

int cmd_iterate(const Args& a) {
    const OperatorSpec spec{parse_kind(a.op), a.op == "bernstein" ? a.k : a.i, a.eps};
    const Polynomial p = Polynomial::parse(a.f);
    const ConvergenceReport rep =
        uniform_convergence_probe(spec, [&](double t) { return p(t); }, a.f, a.m, a.tol);
    const io::Config cfg{{"command", "iterate"},       {"op", a.op},
                         {"param", std::to_string(spec.param)},
                         {"f", a.f},                   {"m_max", std::to_string(a.m)},
                         {"tol", io::format_double(a.tol)}, {"eps", io::format_double(a.eps)}};
    const std::string out = a.out.empty() ? default_out("iterate.csv") : a.out;
    auto os = open_out(out);
    io::write_report_csv(os, rep, cfg);
    std::cout << io::report_json(rep, cfg);
    return 0;
}

int cmd_cesaro(const Args& a) {
    const OperatorSpec spec{parse_kind(a.op), a.op == "bernstein" ? a.k : a.i, a.eps};
    const Polynomial p = Polynomial::parse(a.f);
    if (a.m < 1 || a.m > 10000) throw std::domain_error("cesaro: m must lie in [1, 10^4]");
    const GridFunction avg = cesaro_on_grid(spec, [&](double t) { return p(t); }, a.m);
    const io::Config cfg{{"command", "cesaro"}, {"op", a.op},
                         {"param", std::to_string(spec.param)},
                         {"f", a.f},            {"m", std::to_string(a.m)},
                         {"eps", io::format_double(a.eps)}};
    const std::string out = a.out.empty() ? default_out("cesaro.csv") : a.out;
    auto os = open_out(out);
    std::vector<std::vector<double>> rows;
    for (std::size_t g = 0; g < avg.grid.size(); ++g)
        rows.push_back({avg.grid[g], avg.values[g]});
    io::write_table(os, cfg, {"x", "value"}, rows);
    const AcuRasaResult ar = acu_rasa_verdict([&](double t) { return p(t); }, a.tol);
    std::printf("{\"command\":\"cesaro\",\"admissible\":%s,\"integral\":%s,\"f_at_1\":%s}\n",
                ar.admissible ? "true" : "false", io::format_double(ar.integral).c_str(),
                io::format_double(ar.f_at_1).c_str());
    return 0;
}

int cmd_dual(const Args& a) {
    const auto entries = dual_convergence_probe(a.i, a.x, a.m, a.eps);
    const io::Config cfg{{"command", "dual"},
                         {"i", std::to_string(a.i)},
                         {"x", io::format_double(a.x)},
                         {"m_max", std::to_string(a.m)},
                         {"eps", io::format_double(a.eps)}};
    const std::string out = a.out.empty() ? default_out("dual.csv") : a.out;
    auto os = open_out(out);
    io::write_dual_csv(os, entries, cfg);
    std::printf("{\"command\":\"dual\",\"entries\":%zu,\"final_tv\":%s,\"final_slack\":%s}\n",
                entries.size(), io::format_double(entries.back().tv).c_str(),
                io::format_double(entries.back().slack).c_str());
    return 0;
}

int cmd_gap02(const Args& a) {
    const std::vector<double> xs = a.xs.empty() ? std::vector<double>{a.x} : a.xs;
    const std::vector<GapEntry> detail = gap02_detail(a.i, xs);
    SurveyResult survey{0.0, 1.0};
    for (const GapEntry& e : detail) {
        survey.max_gap = std::max(survey.max_gap, e.gap);
        survey.min_wedge = std::min(survey.min_wedge, e.wedge);
    }
    io::Config cfg{{"command", "gap02"}, {"i", std::to_string(a.i)}};
    std::string xlist;
    for (double x : xs) xlist += (xlist.empty() ? "" : ",") + io::format_double(x);
    cfg.push_back({"x_list", xlist});
    const std::string out = a.out.empty() ? default_out("gap02.csv") : a.out;
    auto os = open_out(out);
    io::write_gap_csv(os, detail, cfg);
    std::cout << io::gap_json(a.i, survey, detail, cfg);
    return 0;
}

int cmd_verify(const Args& a) {
    const auto results = run_acceptance(std::cout, a.only);
    return all_passed(results) ? 0 : 1;
}

int cmd_weights(const Args& a) {
    if (!(a.x >= 0.0 && a.x < 1.0)) throw std::domain_error("weights: x must lie in [0,1)");
    const std::size_t J = a.J > 0 ? a.J : truncation_index(a.i, a.x, a.eps);
    const std::vector<double> alpha = alpha_weights(a.i, a.x, J);
    const std::vector<double> beta = beta_weights(a.i, a.x, J);
    std::vector<double> gamma;
    if (a.gamma) {
        if (truncation_index(a.i, a.x, a.eps / 2.0) > 8192)
            throw accuracy_error("weights: gamma at this x needs too fine a truncation",
                                 beta_tail_bound(a.i, a.x, 8192));
        gamma = gamma_weights(a.i, a.x, J, a.eps);
    }
    io::Config cfg{{"command", "weights"},
                   {"i", std::to_string(a.i)},
                   {"x", io::format_double(a.x)},
                   {"J", std::to_string(J)},
                   {"eps", io::format_double(a.eps)},
                   {"pivot", std::to_string(pivot_index(a.i, a.x))},
                   {"tail_bound", io::format_double(beta_tail_bound(a.i, a.x, J))}};
    const std::string out = a.out.empty() ? default_out("weights.csv") : a.out;
    auto os = open_out(out);
    std::vector<std::string> cols{"j", "alpha", "beta"};
    if (a.gamma) cols.push_back("gamma");
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < J; ++j) {
        std::vector<double> row{static_cast<double>(j), alpha[j], beta[j]};
        if (a.gamma) row.push_back(gamma[j]);
        rows.push_back(std::move(row));
    }
    io::write_table(os, cfg, cols, rows);
    std::printf("{\"command\":\"weights\",\"J\":%zu,\"pivot\":%zu}\n", J,
                pivot_index(a.i, a.x));
    return 0;
}

int cmd_kernel_check(const Args& a) {
    const StochasticityResult r = kernel_stochasticity_check(a.i, a.J, a.quad);
    std::printf(
        "{\"command\":\"kernel-check\",\"i\":%d,\"J\":%zu,\"quad_points\":%d,"
        "\"max_row_err\":%s,\"max_col_err\":%s}\n",
        a.i, a.J, a.quad, io::format_double(r.max_row_err).c_str(),
        io::format_double(r.max_col_err).c_str());
    return 0;
}

int cmd_disc_sim(const Args& a) {
    const DiscState z0{a.z_re, a.z_im};
    const std::vector<DiscState> traj = disc_trajectory(z0, a.n, a.seed, a.stream);
    const io::Config cfg{{"command", "disc-sim"},
                         {"z0", io::format_double(a.z_re) + "+" + io::format_double(a.z_im) + "i"},
                         {"n", std::to_string(a.n)},
                         {"seed", std::to_string(a.seed)},
                         {"stream", std::to_string(a.stream)}};
    const std::string out = a.out.empty() ? default_out("disc.csv") : a.out;
    auto os = open_out(out);
    io::write_trajectory_csv(os, traj, cfg);
    const std::vector<double> avg =
        disc_cesaro([](const DiscState& z) { return z.abs2(); }, z0, a.n, a.seed, a.stream);
    const std::string avg_out = a.avg_out.empty() ? default_out("disc_avg.csv") : a.avg_out;
    auto os2 = open_out(avg_out);
    io::write_average_csv(os2, avg, cfg);
    std::printf("{\"command\":\"disc-sim\",\"steps\":%zu,\"final_avg_abs2\":%s}\n", a.n,
                io::format_double(avg.back()).c_str());
    return 0;
}

int cmd_bernstein_rate(const Args& a) {
    const Polynomial p = Polynomial::parse(a.f);
    const ConvergenceReport rep =
        bernstein_rate_probe(a.k, [&](double t) { return p(t); }, a.f, a.m, a.tol);
    const double lam = bernstein_third_eigenvalue(a.k);
    const io::Config cfg{{"command", "bernstein-rate"},
                         {"k", std::to_string(a.k)},
                         {"f", a.f},
                         {"m_max", std::to_string(a.m)},
                         {"tol", io::format_double(a.tol)}};
    const std::string out = a.out.empty() ? default_out("bernstein_rate.csv") : a.out;
    auto os = open_out(out);
    io::write_report_csv(os, rep, cfg);
    std::printf(
        "{\"command\":\"bernstein-rate\",\"k\":%d,\"rate\":%s,\"third_eigenvalue\":%s,"
        "\"verdict\":\"%s\"}\n",
        a.k, rep.rate ? io::format_double(*rep.rate).c_str() : "null",
        io::format_double(lam).c_str(), io::verdict_name(rep.verdict).c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"experiments on iterated Kantorovich-type Markov operators"};
    app.require_subcommand(1);
    Args a;

    auto* iterate = app.add_subcommand("iterate", "sup-error trace of T^m f against its limit");
    iterate->add_option("--op", a.op, "kantorovich|mkz|bernstein|projection");
    iterate->add_option("--i", a.i, "partition parameter");
    iterate->add_option("--k", a.k, "Bernstein degree");
    iterate->add_option("--f", a.f, "polynomial observable in t");
    iterate->add_option("--m", a.m, "iteration cap");
    iterate->add_option("--tol", a.tol, "convergence tolerance");
    iterate->add_option("--eps", a.eps, "series tolerance");
    iterate->add_option("--out", a.out, "CSV path");

    auto* cesaro = app.add_subcommand("cesaro", "Cesaro average A_m f on the standard grid");
    cesaro->add_option("--op", a.op);
    cesaro->add_option("--i", a.i);
    cesaro->add_option("--k", a.k);
    cesaro->add_option("--f", a.f);
    cesaro->add_option("--m", a.m, "number of averaged iterates");
    cesaro->add_option("--tol", a.tol);
    cesaro->add_option("--eps", a.eps);
    cesaro->add_option("--out", a.out);

    auto* dual = app.add_subcommand("dual", "TV distance of dual iterates to Lebesgue");
    dual->add_option("--i", a.i);
    dual->add_option("--x", a.x, "delta location in [0,1)");
    dual->add_option("--m", a.m, "iteration cap (<= 1000)");
    dual->add_option("--eps", a.eps);
    dual->add_option("--out", a.out);

    auto* gap = app.add_subcommand("gap02", "0-2-law gap and wedge mass at given x");
    gap->add_option("--i", a.i);
    gap->add_option("--x", a.xs, "comma-separated x list")->delimiter(',');
    gap->add_option("--out", a.out);

    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    verify->add_option("--only", a.only, "criterion ids (default all)")->delimiter(',');
    verify->add_option("--i", a.i, "recorded only; the suite is fixed");

    auto* weights = app.add_subcommand("weights", "dump alpha/beta (and gamma) sequences");
    weights->add_option("--i", a.i);
    weights->add_option("--x", a.x);
    weights->add_option("--J", a.J, "entries to dump (0 = up to truncation)");
    weights->add_option("--eps", a.eps);
    weights->add_flag("--gamma", a.gamma, "include the two-step image weights");
    weights->add_option("--out", a.out);

    auto* kcheck = app.add_subcommand("kernel-check", "double stochasticity errors");
    kcheck->add_option("--i", a.i);
    kcheck->add_option("--J", a.J, "columns to check");
    kcheck->add_option("--quad", a.quad, "row sample count");

    auto* disc = app.add_subcommand("disc-sim", "disc diffusion trajectory and running average");
    disc->add_option("--re", a.z_re, "start, real part");
    disc->add_option("--im", a.z_im, "start, imaginary part");
    disc->add_option("--n", a.n, "steps (<= 10^7)");
    disc->add_option("--seed", a.seed);
    disc->add_option("--stream", a.stream);
    disc->add_option("--out", a.out, "trajectory CSV path");
    disc->add_option("--avg-out", a.avg_out, "running-average CSV path");

    auto* brate = app.add_subcommand("bernstein-rate", "geometric rate of B_k^m toward its limit");
    brate->add_option("--k", a.k);
    brate->add_option("--f", a.f);
    brate->add_option("--m", a.m);
    brate->add_option("--tol", a.tol);
    brate->add_option("--out", a.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help() << "\n";
        return 64;
    }

    try {
        if (*iterate) return cmd_iterate(a);
        if (*cesaro) return cmd_cesaro(a);
        if (*dual) return cmd_dual(a);
        if (*gap) return cmd_gap02(a);
        if (*verify) return cmd_verify(a);
        if (*weights) return cmd_weights(a);
        if (*kcheck) return cmd_kernel_check(a);
        if (*disc) return cmd_disc_sim(a);
        if (*brate) return cmd_bernstein_rate(a);
    } catch (const accuracy_error& e) {
        std::cerr << "accuracy: " << e.what() << " (achieved bound " << e.achieved_bound
                  << ")\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "domain: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
