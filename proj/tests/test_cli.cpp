// End-to-end checks of the kanto binary: exit codes, file outputs, stdout summaries.
// The binary path arrives through the KANTO_CLI_PATH compile definition.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <sys/wait.h>

#include "json.hpp"

namespace {

const std::string& tmp_dir() {
    static const std::string d = [] {
        char tmpl[] = "/tmp/kanto_cli_XXXXXX";
        if (!mkdtemp(tmpl)) throw std::runtime_error("mkdtemp failed");
        return std::string(tmpl);
    }();
    return d;
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

struct RunResult {
    int code = -1;
    std::string out;  // stdout and stderr interleaved
};

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    const std::string log = tmp_dir() + "/log" + std::to_string(counter++) + ".txt";
    std::string cmd = env_prefix;
    if (!cmd.empty()) cmd += " ";
    cmd += "\"" KANTO_CLI_PATH "\" " + args + " > \"" + log + "\" 2>&1";
    const int st = std::system(cmd.c_str());
    RunResult r;
    if (st >= 0 && WIFEXITED(st)) r.code = WEXITSTATUS(st);
    r.out = slurp(log);
    return r;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

std::string out_path(const std::string& name) { return tmp_dir() + "/" + name; }

} // namespace

TEST_CASE("help and usage errors") {
    const RunResult help = run_cli("--help");
    CHECK(help.code == 0);
    CHECK(contains(help.out, "iterate"));
    CHECK(contains(help.out, "disc-sim"));

    CHECK(run_cli("").code == 64);
    CHECK(run_cli("frobnicate").code == 64);
    CHECK(run_cli("iterate --bogus 3").code == 64);
}

TEST_CASE("domain errors exit 1 with a prefixed message") {
    const RunResult bad_i = run_cli("iterate --i 0 --m 5 --out \"" + out_path("never.csv") + "\"");
    CHECK(bad_i.code == 1);
    CHECK(contains(bad_i.out, "domain:"));

    const RunResult bad_x = run_cli("dual --i 1 --x 1.5 --m 2");
    CHECK(bad_x.code == 1);
    CHECK(contains(bad_x.out, "domain:"));

    const RunResult bad_m = run_cli("cesaro --i 1 --m 0");
    CHECK(bad_m.code == 1);
    CHECK(contains(bad_m.out, "domain:"));
}

TEST_CASE("iterate writes a config-stamped CSV and a JSON verdict") {
    const std::string csv = out_path("it.csv");
    const RunResult r = run_cli(
        "iterate --op kantorovich --i 1 --f \"3*t^2-4*t\" --m 300 --tol 1e-2 --out \"" + csv +
        "\"");
    REQUIRE(r.code == 0);

    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["verdict"].get<std::string>() == "converges");
    CHECK(j["config"]["command"].get<std::string>() == "iterate");
    CHECK(j["observable"].get<std::string>() == "3*t^2-4*t");
    CHECK(j["m_final"].get<int>() >= 1);
    REQUIRE(j["rate"].is_number());
    CHECK(j["rate"].get<double>() > 0.5);
    CHECK(j["rate"].get<double>() < 0.999);
    CHECK(j["final_sup_error"].get<double>() < 1e-2);

    const std::string body = slurp(csv);
    REQUIRE_FALSE(body.empty());
    CHECK(body.rfind("# command=iterate\n", 0) == 0);
    CHECK(contains(body, "# f=3*t^2-4*t\n"));
    CHECK(contains(body, "\nm,sup_error,lower_interval,upper_interval\n"));
}

TEST_CASE("cesaro stamps admissibility on stdout") {
    const std::string csv = out_path("ces.csv");
    const RunResult r = run_cli("cesaro --op kantorovich --i 1 --f t --m 50 --out \"" + csv + "\"");
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "\"admissible\":false"));
    CHECK(contains(r.out, "\"integral\":0.5"));
    const std::string body = slurp(csv);
    CHECK(body.rfind("# command=cesaro\n", 0) == 0);
    CHECK(contains(body, "\nx,value\n"));
}

TEST_CASE("dual runs the full budget without a stop rule") {
    const std::string csv = out_path("dual.csv");
    const RunResult r = run_cli("dual --i 1 --x 0 --m 3 --eps 1e-6 --out \"" + csv + "\"");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["entries"].get<int>() == 4);
    CHECK(j["final_tv"].get<double>() <= 2.0);
    const std::string body = slurp(csv);
    CHECK(body.rfind("# command=dual\n", 0) == 0);
    CHECK(contains(body, "\nm,tv,lower_interval,upper_interval\n"));
}

TEST_CASE("gap02 emits a survey verdict over the x list") {
    const std::string csv = out_path("gap.csv");
    const RunResult r = run_cli("gap02 --i 1 --x 0,0.5 --out \"" + csv + "\"");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["pass"].get<bool>());
    CHECK(j["max_gap"].get<double>() <= 2.0 - 1e-3);
    CHECK(j["min_wedge"].get<double>() >= 1e-3);
    CHECK(j["detail"].size() == 2);
    CHECK(j["config"]["x_list"].get<std::string>() == "0,0.5");
    CHECK(contains(slurp(csv), "\nx,gap,wedge,bounded\n"));
}

TEST_CASE("weights dumps the requested span and gates gamma by depth") {
    const std::string csv = out_path("w.csv");
    const RunResult ok = run_cli("weights --i 1 --x 0.5 --J 16 --gamma --out \"" + csv + "\"");
    REQUIRE(ok.code == 0);
    CHECK(contains(ok.out, "\"J\":16"));
    const std::string body = slurp(csv);
    CHECK(contains(body, "# pivot=1\n"));
    CHECK(contains(body, "\nj,alpha,beta,gamma\n"));

    // far enough out that the two-step image cannot be truncated within the cap
    const RunResult deep = run_cli("weights --i 1 --x 0.9995 --J 8 --gamma");
    CHECK(deep.code == 2);
    CHECK(contains(deep.out, "accuracy:"));
    CHECK(contains(deep.out, "achieved bound"));

    CHECK(run_cli("weights --i 1 --x 1.0 --J 4").code == 1);
}

TEST_CASE("kernel-check reports tiny stochasticity errors") {
    const RunResult r = run_cli("kernel-check --i 1 --J 40 --quad 16");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["max_row_err"].get<double>() < 1e-8);
    CHECK(j["max_col_err"].get<double>() < 1e-10);
}

TEST_CASE("bernstein-rate ties the fitted rate to the third eigenvalue") {
    const std::string csv = out_path("br.csv");
    const RunResult r =
        run_cli("bernstein-rate --k 3 --f t^2 --m 200 --tol 1e-6 --out \"" + csv + "\"");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["verdict"].get<std::string>() == "converges");
    CHECK(j["third_eigenvalue"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    REQUIRE(j["rate"].is_number());
    CHECK(j["rate"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(0.02));
}

TEST_CASE("verify runs a criterion subset") {
    const RunResult r = run_cli("verify --only 2,12");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "[PASS] 02"));
    CHECK(contains(r.out, "[PASS] 12"));
    CHECK_FALSE(contains(r.out, "[FAIL]"));
}

TEST_CASE("disc-sim is reproducible byte for byte") {
    const std::string t1 = out_path("t1.csv"), a1 = out_path("a1.csv");
    const std::string t2 = out_path("t2.csv"), a2 = out_path("a2.csv");
    const std::string t3 = out_path("t3.csv"), a3 = out_path("a3.csv");
    const std::string common = "disc-sim --re 0.25 --im -0.125 --n 500 --stream 4 ";

    const RunResult r1 = run_cli(common + "--seed 11 --out \"" + t1 + "\" --avg-out \"" + a1 + "\"");
    REQUIRE(r1.code == 0);
    CHECK(contains(r1.out, "\"command\":\"disc-sim\""));
    CHECK(contains(r1.out, "\"steps\":500"));

    REQUIRE(run_cli(common + "--seed 11 --out \"" + t2 + "\" --avg-out \"" + a2 + "\"").code == 0);
    REQUIRE(run_cli(common + "--seed 12 --out \"" + t3 + "\" --avg-out \"" + a3 + "\"").code == 0);

    const std::string traj = slurp(t1);
    REQUIRE_FALSE(traj.empty());
    CHECK(traj == slurp(t2));
    CHECK(slurp(a1) == slurp(a2));
    CHECK(traj != slurp(t3));
    CHECK(contains(traj, "\nstep,re,im\n"));
    CHECK(contains(traj, "\n0,0.25,-0.125\n"));
}

TEST_CASE("default outputs land in KANTO_OUTPUT_DIR") {
    const std::string sub = tmp_dir() + "/outdir";
    std::filesystem::create_directories(sub);
    const RunResult r =
        run_cli("weights --i 2 --x 0.25 --J 5", "KANTO_OUTPUT_DIR=\"" + sub + "\"");
    REQUIRE(r.code == 0);
    CHECK(std::filesystem::exists(sub + "/weights.csv"));
}
