#include "kanto/io.hpp"

#include <cstdio>
#include <cstdlib>

#include "json.hpp"

#include "kanto/seqcore.hpp"

namespace kanto::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::converges: return "converges";
        case Verdict::diverges: return "diverges";
        default: return "inconclusive";
    }
}

std::string kind_name(OperatorSpec::Kind k) {
    switch (k) {
        case OperatorSpec::Kind::Projection: return "projection";
        case OperatorSpec::Kind::Bernstein: return "bernstein";
        case OperatorSpec::Kind::MKZ: return "mkz";
        default: return "kantorovich";
    }
}

void write_config_header(std::ostream& os, const Config& cfg) {
    for (const auto& [k, v] : cfg) os << "# " << k << "=" << v << "\n";
}

void write_table(std::ostream& os, const Config& cfg, const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows) {
    write_config_header(os, cfg);
    for (std::size_t c = 0; c < columns.size(); ++c)
        os << (c ? "," : "") << columns[c];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            os << (c ? "," : "") << format_double(row[c]);
        os << "\n";
    }
}

void write_report_csv(std::ostream& os, const ConvergenceReport& rep, const Config& cfg) {
    std::vector<std::vector<double>> rows;
    rows.reserve(rep.m_values.size());
    for (std::size_t n = 0; n < rep.m_values.size(); ++n) {
        const double e = rep.sup_errors[n];
        rows.push_back({static_cast<double>(rep.m_values[n]), e,
                        std::max(0.0, e - rep.slack), e + rep.slack});
    }
    write_table(os, cfg, {"m", "sup_error", "lower_interval", "upper_interval"}, rows);
}

std::string report_json(const ConvergenceReport& rep, const Config& cfg) {
    nlohmann::json j;
    j["observable"] = rep.observable_id;
    j["op"] = {{"kind", kind_name(rep.op.kind)}, {"param", rep.op.param}, {"eps", rep.op.eps}};
    j["verdict"] = verdict_name(rep.verdict);
    if (rep.rate)
        j["rate"] = *rep.rate;
    else
        j["rate"] = nullptr;
    if (rep.affine_target)
        j["target"] = "affine";
    else
        j["target"] = rep.target_constant;
    j["certified_floor"] = rep.certified_floor;
    j["slack"] = rep.slack;
    j["m_final"] = rep.m_values.empty() ? 0 : rep.m_values.back();
    j["final_sup_error"] = rep.sup_errors.empty() ? 0.0 : rep.sup_errors.back();
    nlohmann::json c;
    for (const auto& [k, v] : cfg) c[k] = v;
    j["config"] = c;
    return j.dump(2) + "\n";
}

void write_measure_csv(std::ostream& os, const PartitionMeasure& mu, const Config& cfg) {
    write_config_header(os, cfg);
    os << "l,left,right,coeff\n";
    for (std::size_t l = 0; l < mu.cells(); ++l) {
        os << l << "," << format_double(partition_point(mu.i, l)) << ","
           << format_double(partition_point(mu.i, l + 1)) << "," << format_double(mu.coeffs[l])
           << "\n";
    }
    os << "atom1," << format_double(mu.atom1) << "\n";
    os << "tail_mass_bound," << format_double(mu.tail_mass_bound) << "\n";
    os << "i," << mu.i << "\n";
}

void write_gap_csv(std::ostream& os, const std::vector<GapEntry>& detail, const Config& cfg) {
    write_config_header(os, cfg);
    os << "x,gap,wedge,bounded\n";
    for (const GapEntry& e : detail)
        os << format_double(e.x) << "," << format_double(e.gap) << ","
           << format_double(e.wedge) << "," << (e.bounded ? 1 : 0) << "\n";
}

std::string gap_json(int i, const SurveyResult& survey, const std::vector<GapEntry>& detail,
                     const Config& cfg) {
    nlohmann::json j;
    j["i"] = i;
    j["max_gap"] = survey.max_gap;
    j["min_wedge"] = survey.min_wedge;
    j["pass"] = survey.max_gap <= 2.0 - 1e-3 && survey.min_wedge >= 1e-3;
    nlohmann::json rows = nlohmann::json::array();
    for (const GapEntry& e : detail)
        rows.push_back({{"x", e.x}, {"gap", e.gap}, {"wedge", e.wedge}, {"bounded", e.bounded}});
    j["detail"] = rows;
    nlohmann::json c;
    for (const auto& [k, v] : cfg) c[k] = v;
    j["config"] = c;
    return j.dump(2) + "\n";
}

void write_dual_csv(std::ostream& os, const std::vector<DualProbeEntry>& entries,
                    const Config& cfg) {
    std::vector<std::vector<double>> rows;
    rows.reserve(entries.size());
    for (std::size_t m = 0; m < entries.size(); ++m)
        rows.push_back({static_cast<double>(m), entries[m].tv,
                        std::max(0.0, entries[m].tv - entries[m].slack),
                        entries[m].tv + entries[m].slack});
    write_table(os, cfg, {"m", "tv", "lower_interval", "upper_interval"}, rows);
}

void write_trajectory_csv(std::ostream& os, const std::vector<DiscState>& traj,
                          const Config& cfg) {
    write_config_header(os, cfg);
    os << "step,re,im\n";
    for (std::size_t k = 0; k < traj.size(); ++k)
        os << k << "," << format_double(traj[k].re) << "," << format_double(traj[k].im) << "\n";
}

void write_average_csv(std::ostream& os, const std::vector<double>& avg, const Config& cfg) {
    write_config_header(os, cfg);
    os << "step,avg\n";
    for (std::size_t k = 0; k < avg.size(); ++k) os << k << "," << format_double(avg[k]) << "\n";
}

std::string output_dir() {
    const char* d = std::getenv("KANTO_OUTPUT_DIR");
    return d && *d ? d : ".";
}

} // namespace kanto::io
