// End-to-end tests of the command-line tool: drives the real binary through
// std::system, inspects exit codes, stderr diagnostics and the files written.

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string cli = QMEMSIM_CLI_PATH;

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("qmemsim_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string str() const { return path.string(); }
};

int run_cli(const std::string& args, const fs::path& stderr_to = {}) {
    std::string cmd = cli + " " + args + " >/dev/null";
    cmd += stderr_to.empty() ? " 2>/dev/null" : (" 2>" + stderr_to.string());
    const int st = std::system(cmd.c_str());
    REQUIRE(st != -1);
    REQUIRE(WIFEXITED(st));
    return WEXITSTATUS(st);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> cols;  // column-major
    std::size_t rows() const { return cols.empty() ? 0 : cols[0].size(); }
};

Csv read_csv(const fs::path& p) {
    std::ifstream f(p);
    REQUIRE(f.good());
    Csv out;
    std::string line;
    REQUIRE(std::getline(f, line));
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) out.header.push_back(cell);
    out.cols.resize(out.header.size());
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::size_t c = 0;
        while (std::getline(ls, cell, ',')) {
            REQUIRE(c < out.cols.size());
            out.cols[c++].push_back(std::strtod(cell.c_str(), nullptr));
        }
        REQUIRE(c == out.cols.size());
    }
    return out;
}

}  // namespace

TEST_CASE("help exits cleanly") { CHECK(run_cli("--help") == 0); }

TEST_CASE("optimal-pulse writes a normalized pulse and its summary") {
    TempDir dir;
    REQUIRE(run_cli("optimal-pulse --alphaL 100 --out " + dir.str()) == 0);

    const Csv csv = read_csv(dir.path / "optimal_pulse_alphaL100.csv");
    REQUIRE(csv.header == std::vector<std::string>{"t_over_T2", "F_in"});
    REQUIRE(csv.rows() > 1000);
    const double dt = csv.cols[0][1] - csv.cols[0][0];
    double prob = 0.0;
    for (double v : csv.cols[1]) prob += v * v * dt;
    CHECK(std::abs(prob - 1.0) <= 1e-4);
    // Pulse is supported on t < 0.
    for (std::size_t k = 0; k < csv.rows(); ++k) {
        if (csv.cols[0][k] > 0.0) CHECK(csv.cols[1][k] == 0.0);
    }

    const json j = read_json(dir.path / "optimal_pulse_alphaL100.json");
    CHECK(j.at("A_L").get<double>() == doctest::Approx(0.1501219556).epsilon(1e-6));
    CHECK(j.at("normalization_residual").get<double>() <= 1e-4);
    CHECK(j.at("alpha_L").get<double>() == 100.0);

    const json prov = read_json(dir.path / "provenance.json");
    CHECK(prov.contains("wall_time_s"));
    CHECK(prov.at("command").get<std::string>() == "optimal-pulse");
}

TEST_CASE("non-positive optical depth is refused with a clear message") {
    TempDir dir;
    const fs::path errfile = dir.path / "stderr.txt";
    CHECK(run_cli("optimal-pulse --alphaL 0 --out " + dir.str(), errfile) == 2);
    CHECK(slurp(errfile).find("optical depth must be positive") != std::string::npos);
}

TEST_CASE("format json suppresses the CSV output") {
    TempDir dir;
    REQUIRE(run_cli("optimal-pulse --alphaL 10 --format json --out " + dir.str()) == 0);
    CHECK(!fs::exists(dir.path / "optimal_pulse_alphaL10.csv"));
    const json j = read_json(dir.path / "optimal_pulse_alphaL10.json");
    CHECK(j.at("A_L").get<double>() == doctest::Approx(0.5536420813).epsilon(1e-6));
}

TEST_CASE("simulate emits fields, profile and coherent metrics at depth 100") {
    TempDir dir;
    REQUIRE(run_cli("simulate --alphaL 100 --z-points 64 --out " + dir.str()) == 0);

    for (const char* name : {"input_alphaL100.csv", "output_alphaL100.csv",
                             "profile_alphaL100.csv", "metrics_alphaL100.json"}) {
        CAPTURE(name);
        CHECK(fs::exists(dir.path / name));
    }

    const json j = read_json(dir.path / "metrics_alphaL100.json");
    for (const char* key : {"efficiency", "efficiency_asymptotic", "leak_before_zero", "p_abs",
                            "p_abs_closed", "first_burst_fraction", "flatness_cv",
                            "boundary_layer_width"}) {
        CAPTURE(key);
        CHECK(j.contains(key));
    }
    CHECK(j.at("efficiency").get<double>() > 0.70);
    CHECK(j.at("efficiency").get<double>() < 0.80);
    CHECK(j.at("efficiency_asymptotic").get<double>() ==
          doctest::Approx(0.7743241665808975).epsilon(1e-9));
    CHECK(j.at("first_burst_fraction").get<double>() > 0.80);
    CHECK(j.at("first_burst_fraction").get<double>() < 0.88);
    CHECK(j.at("p_abs").get<double>() ==
          doctest::Approx(j.at("p_abs_closed").get<double>()).epsilon(0.03));
    CHECK(j.at("renormalized_input").get<bool>() == false);

    const Csv prof = read_csv(dir.path / "profile_alphaL100.csv");
    REQUIRE(prof.header == std::vector<std::string>{"z", "re", "im"});
    CHECK(prof.cols[0].front() == 0.0);
    CHECK(prof.cols[0].back() == 1.0);

    const Csv out = read_csv(dir.path / "output_alphaL100.csv");
    REQUIRE(out.header == std::vector<std::string>{"t", "re", "im"});
    CHECK(out.rows() > 1000);
}

TEST_CASE("a written input fed back in reproduces the metrics") {
    TempDir a, b;
    REQUIRE(run_cli("simulate --alphaL 10 --z-points 64 --out " + a.str()) == 0);
    REQUIRE(run_cli("simulate --alphaL 10 --z-points 64 --input " +
                    (a.path / "input_alphaL10.csv").string() + " --out " + b.str()) == 0);

    const json ja = read_json(a.path / "metrics_alphaL10.json");
    const json jb = read_json(b.path / "metrics_alphaL10.json");
    CHECK(std::abs(ja.at("efficiency").get<double>() - jb.at("efficiency").get<double>()) <= 1e-6);
    CHECK(std::abs(ja.at("p_abs").get<double>() - jb.at("p_abs").get<double>()) <= 1e-6);
    CHECK(std::abs(ja.at("leak_before_zero").get<double>() -
                   jb.at("leak_before_zero").get<double>()) <= 1e-6);
    // The optimal pulse is already unit-probability: no renormalization.
    CHECK(jb.at("renormalized_input").get<bool>() == false);
}

TEST_CASE("malformed input CSV fails with row/column diagnostics") {
    TempDir dir;
    const fs::path errfile = dir.path / "stderr.txt";

    {
        std::ofstream f(dir.path / "bad.csv");
        f << "t,re,im\n0,0.5,0\n0.1,abc,0\n";
    }
    CHECK(run_cli("simulate --alphaL 10 --input " + (dir.path / "bad.csv").string() + " --out " +
                      dir.str(),
                  errfile) == 2);
    const std::string msg = slurp(errfile);
    CHECK(msg.find("row 3") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);

    {
        std::ofstream f(dir.path / "badheader.csv");
        f << "time,re,im\n0,0.5,0\n0.1,0.5,0\n";
    }
    CHECK(run_cli("simulate --alphaL 10 --input " + (dir.path / "badheader.csv").string() +
                      " --out " + dir.str(),
                  errfile) == 2);
    CHECK(slurp(errfile).find("t,re,im") != std::string::npos);

    CHECK(run_cli("simulate --alphaL 10 --input " + (dir.path / "missing.csv").string() +
                      " --out " + dir.str(),
                  errfile) == 3);
}

TEST_CASE("an off-normalization input is renormalized with a warning") {
    TempDir dir;
    const fs::path errfile = dir.path / "stderr.txt";
    {
        std::ofstream f(dir.path / "in.csv");
        f << "t,re,im\n";
        // Rectangular pulse on t in [-2, 0), probability 2 * 0.64 = 1.28.
        const double dt = 0.05;
        for (int k = 0; k < 80; ++k) {
            const double t = -2.0 + (k + 0.5) * dt;
            f << t << "," << (t < 0.0 ? 0.8 : 0.0) << ",0\n";
        }
    }
    REQUIRE(run_cli("simulate --alphaL 10 --format json --input " +
                        (dir.path / "in.csv").string() + " --out " + dir.str(),
                    errfile) == 0);
    CHECK(slurp(errfile).find("renormalizing") != std::string::npos);
    const json j = read_json(dir.path / "metrics_alphaL10.json");
    CHECK(j.at("renormalized_input").get<bool>() == true);
    CHECK(std::abs(j.at("input_probability").get<double>() - 1.0) <= 1e-9);
}

TEST_CASE("sweep covers the asymptote and is thread-count invariant") {
    TempDir dir;
    REQUIRE(run_cli("sweep --alphaL 10 --alphaL 100 --alphaL 1000 --z-points 64 --out " +
                    dir.str()) == 0);
    const Csv sw = read_csv(dir.path / "sweep.csv");
    REQUIRE(sw.header ==
            std::vector<std::string>{"alphaL", "efficiency", "efficiency_asymptotic", "abs_delta",
                                     "p_abs", "p_abs_closed", "first_burst_fraction",
                                     "flatness_cv", "status"});
    REQUIRE(sw.rows() == 3);
    CHECK(sw.cols[2][0] == doctest::Approx(0.2863503535388916).epsilon(1e-9));
    CHECK(sw.cols[2][1] == doctest::Approx(0.7743241665808975).epsilon(1e-9));
    CHECK(sw.cols[2][2] == doctest::Approx(0.9286350353538891).epsilon(1e-9));
    // Approach to the asymptote: |E - E_asym| strictly decreasing in depth.
    CHECK(sw.cols[3][0] > sw.cols[3][1]);
    CHECK(sw.cols[3][1] > sw.cols[3][2]);

    // Same request with two workers and a duplicated point: identical rows,
    // identical bytes for the shared depth.
    TempDir dir2;
    REQUIRE(run_cli("sweep --alphaL 10 --alphaL 10 --jobs 2 --z-points 64 --out " + dir2.str()) ==
            0);
    std::ifstream f(dir2.path / "sweep.csv");
    std::string header, row1, row2;
    REQUIRE(std::getline(f, header));
    REQUIRE(std::getline(f, row1));
    REQUIRE(std::getline(f, row2));
    CHECK(row1 == row2);

    // And the single-thread run of depth 10 must match byte for byte.
    std::stringstream first_row_single;
    {
        std::ifstream fs1(dir.path / "sweep.csv");
        std::string h, r;
        REQUIRE(std::getline(fs1, h));
        REQUIRE(std::getline(fs1, r));
        first_row_single << r;
    }
    CHECK(first_row_single.str() == row1);
}

TEST_CASE("fig2 residual against lossless retrieval carries the kernel energy") {
    TempDir dir;
    REQUIRE(run_cli("figure fig2 --alphaL 100 --out " + dir.str()) == 0);
    const Csv fig = read_csv(dir.path / "fig2_alphaL100.csv");
    REQUIRE(fig.header == std::vector<std::string>{"t_over_T2", "F_in", "F_out",
                                                   "retrieved_ideal"});
    const double dt = fig.cols[0][1] - fig.cols[0][0];

    double in_prob = 0.0, residual = 0.0;
    for (std::size_t k = 0; k < fig.rows(); ++k) {
        in_prob += fig.cols[1][k] * fig.cols[1][k] * dt;
        const double d = fig.cols[2][k] - fig.cols[3][k];
        residual += d * d * dt;
    }
    CHECK(std::abs(in_prob - 1.0) <= 1e-4);
    // The deviation from lossless retrieval is exactly the backscatter
    // kernel; its energy at depth 100 is 0.0740693.
    CHECK(residual == doctest::Approx(0.07406929).epsilon(0.10));

    // Ideal retrieval lives at t > 0 only.
    for (std::size_t k = 0; k < fig.rows(); ++k) {
        if (fig.cols[0][k] < 0.0) CHECK(fig.cols[3][k] == 0.0);
    }
}

TEST_CASE("fig3 profiles share one axis and show the far-end dip") {
    TempDir dir;
    REQUIRE(run_cli("figure fig3 --out " + dir.str()) == 0);
    const Csv fig = read_csv(dir.path / "fig3.csv");
    REQUIRE(fig.header == std::vector<std::string>{"z_over_L", "c_alphaL10", "c_alphaL100",
                                                   "c_alphaL1000"});
    REQUIRE(fig.rows() == 1024);
    CHECK(fig.cols[0].front() == 0.0);
    CHECK(fig.cols[0].back() == 1.0);

    // Depth 1000: plateau value times sqrt(1 - g) is 1 by construction.
    std::vector<double> plateau;
    for (std::size_t k = 0; k < fig.rows(); ++k) {
        if (fig.cols[0][k] <= 0.8) plateau.push_back(std::abs(fig.cols[3][k]));
    }
    std::sort(plateau.begin(), plateau.end());
    const double med = plateau[plateau.size() / 2];
    const double one_minus_g_1000 = 1.0 - 0.0356735584;
    CHECK(med * std::sqrt(one_minus_g_1000) == doctest::Approx(1.0).epsilon(0.03));

    // Far-end dip: the endpoint sits at roughly 1/sqrt(pi) below the plateau.
    const double ratio = std::abs(fig.cols[3].back()) / med;
    CHECK(ratio > 0.43);
    CHECK(ratio < 0.55);

    // Shallower media dip earlier and less sharply.
    const double ratio10 = std::abs(fig.cols[1].back()) /
                           std::abs(fig.cols[1][fig.rows() / 2]);
    CHECK(ratio10 < 1.0);
}

TEST_CASE("config file supplies defaults, flags override") {
    TempDir dir;
    {
        std::ofstream f(dir.path / "cfg.json");
        f << R"({"alphaL": [10], "z_points": 64, "format": "json"})";
    }
    REQUIRE(run_cli("simulate --config " + (dir.path / "cfg.json").string() +
                    " --z-points 128 --out " + dir.str()) == 0);
    CHECK(fs::exists(dir.path / "metrics_alphaL10.json"));
    CHECK(!fs::exists(dir.path / "input_alphaL10.csv"));  // format json from config
    const json prov = read_json(dir.path / "provenance.json");
    CHECK(prov.at("z_points").get<std::size_t>() == 128);  // flag beats config
    CHECK(prov.at("alpha_L") == json::array({10.0}));

    {
        std::ofstream f(dir.path / "bad_cfg.json");
        f << R"({"alpha": 10})";
    }
    CHECK(run_cli("simulate --config " + (dir.path / "bad_cfg.json").string() + " --out " +
                  dir.str()) == 2);
}

TEST_CASE("reruns are byte-identical apart from provenance") {
    TempDir a, b;
    REQUIRE(run_cli("simulate --alphaL 10 --z-points 64 --format json --out " + a.str()) == 0);
    REQUIRE(run_cli("simulate --alphaL 10 --z-points 64 --format json --out " + b.str()) == 0);
    CHECK(slurp(a.path / "metrics_alphaL10.json") == slurp(b.path / "metrics_alphaL10.json"));
}

TEST_CASE("unknown figure name is a usage error") {
    CHECK(run_cli("figure fig9") == 2);
}

TEST_CASE("an output path colliding with a file is an I/O error") {
    TempDir dir;
    const fs::path blocker = dir.path / "blocker";
    std::ofstream(blocker) << "x";
    CHECK(run_cli("optimal-pulse --alphaL 10 --out " + blocker.string()) == 3);
}
