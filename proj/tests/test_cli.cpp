#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "ringcorr/cli.hpp"

namespace {

struct RunResult {
    int status;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(RINGCORR_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, {}};
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int raw = pclose(pipe);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    for (std::string f; std::getline(in, f, ',');) out.push_back(f);
    return out;
}

/// Data rows of a CSV document (skips comment and header lines).
std::vector<std::vector<std::string>> csv_rows(const std::string& doc) {
    std::vector<std::vector<std::string>> rows;
    bool header = true;
    for (const auto& l : lines(doc)) {
        if (l.empty() || l[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        rows.push_back(split(l));
    }
    return rows;
}

std::map<std::string, std::string> info_values(const std::string& doc) {
    std::map<std::string, std::string> kv;
    for (const auto& r : csv_rows(doc)) kv[r.at(0)] = r.at(1);
    return kv;
}

std::string summary_value(const std::string& doc, const std::string& key) {
    for (const auto& l : lines(doc))
        if (l.rfind("# " + key + "=", 0) == 0) return l.substr(key.size() + 3);
    return {};
}

} // namespace

TEST(CliInfo, UnitParameters) {
    const RunResult r = run_cli("info --mass 1 --radius 1 --hbar 1 --beta 2");
    ASSERT_EQ(r.status, 0);
    auto kv = info_values(r.out);
    EXPECT_EQ(kv["alpha"], "2");
    EXPECT_EQ(kv["period"], "12.566370614359172");
    EXPECT_EQ(std::stod(kv["period"]), 4.0 * M_PI);
    EXPECT_EQ(kv["representation"], "poisson");
}

TEST(CliInfo, MeanEnergyResolvesBeta) {
    const auto a = info_values(run_cli("info --beta 2").out);
    const RunResult r = run_cli("info --mean-energy " + a.at("mean_energy"));
    ASSERT_EQ(r.status, 0);
    EXPECT_NEAR(std::stod(info_values(r.out).at("beta")), 2.0, 1e-10 * 2.0);
}

TEST(CliUsage, ExitStatusTwo) {
    EXPECT_EQ(run_cli("info").status, 2);
    EXPECT_EQ(run_cli("info --beta 1 --mean-energy 1").status, 2);
    EXPECT_EQ(run_cli("").status, 2);
    EXPECT_EQ(run_cli("warp --beta 1").status, 2);
    EXPECT_EQ(run_cli("scan --beta 1 --rep fourier").status, 2);
    EXPECT_EQ(run_cli("scan --beta 1 --format xml").status, 2);
    EXPECT_EQ(run_cli("scan --beta 1 --mass -1").status, 2);
    EXPECT_EQ(run_cli("scan --beta 0").status, 2);
    EXPECT_EQ(run_cli("scan --beta 1 --tmin 2 --tmax 1").status, 2);
    EXPECT_EQ(run_cli("scan --beta 1 --points 0").status, 2);
    EXPECT_EQ(run_cli("scan --beta 1 --eps 0").status, 2);
    EXPECT_EQ(run_cli("scan --beta abc").status, 2);
    EXPECT_EQ(run_cli("info --mean-energy 1e300").status, 2);
    EXPECT_EQ(run_cli("--help").status, 0);
}

TEST(CliScan, SinglePointAtZero) {
    const RunResult r = run_cli("scan --radius 2 --beta 1 --points 1");
    ASSERT_EQ(r.status, 0);
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 1u);
    const std::vector<std::string> expected{"0", "2", "0", "2", "0", "2", "0", "0", "ok"};
    EXPECT_EQ(rows[0], expected);
}

TEST(CliScan, HeaderRecordsProvenance) {
    const RunResult a = run_cli("scan --beta 1 --points 5");
    const RunResult b = run_cli("scan --beta 1 --points 6");
    const std::string head = lines(a.out).at(0);
    EXPECT_EQ(head.rfind("# ringcorr 0.1.0 command=scan config_hash=fnv1a64:", 0), 0u) << head;
    EXPECT_NE(head.find("generator=mt19937_64"), std::string::npos);
    EXPECT_NE(lines(b.out).at(0), head);
    EXPECT_EQ(lines(a.out).at(1), "t,re_c1,im_c1,re_c2,im_c2,c1_classical,abs_c1_minus_classical,tail_bound,status");
}

TEST(CliScan, Deterministic) {
    const std::string args = "scan --mass 1.3 --radius 0.7 --hbar 0.4 --beta 2.2 --points 301";
    const RunResult a = run_cli(args);
    const RunResult b = run_cli(args);
    ASSERT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(run_cli(args + " --threads 1").out, run_cli(args + " --threads 3").out);
    EXPECT_EQ(run_cli(args + " --format json").out, run_cli(args + " --format json").out);
}

TEST(CliScan, OutputFileMatchesStdout) {
    const std::string path = ::testing::TempDir() + "ringcorr_scan.csv";
    const std::string args = "scan --beta 1.5 --points 17";
    ASSERT_EQ(run_cli(args + " --out " + path).status, 0);
    std::ifstream f(path, std::ios::binary);
    const std::string file((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    EXPECT_EQ(file, run_cli(args).out);
    std::remove(path.c_str());
}

TEST(CliScan, PeriodEndsAndRepresentationsAgree) {
    const std::string base = "scan --mass 1 --radius 1.5 --hbar 1 --beta 0.3 --points 401";
    const auto direct = csv_rows(run_cli(base + " --rep direct").out);
    const auto poisson = csv_rows(run_cli(base + " --rep poisson").out);
    ASSERT_EQ(direct.size(), 401u);
    ASSERT_EQ(poisson.size(), 401u);
    const double tol = 1e-10 * 1.5 * 1.5;
    EXPECT_LE(std::hypot(std::stod(direct.front()[1]) - std::stod(direct.back()[1]),
                         std::stod(direct.front()[2]) - std::stod(direct.back()[2])),
              tol);
    double worst = 0.0;
    for (std::size_t i = 0; i < direct.size(); ++i)
        worst = std::max(worst, std::hypot(std::stod(direct[i][1]) - std::stod(poisson[i][1]),
                                           std::stod(direct[i][2]) - std::stod(poisson[i][2])));
    EXPECT_LE(worst, tol);
}

TEST(CliScan, JsonParsesWithSameFields) {
    const RunResult r = run_cli("scan --beta 2 --points 7 --format json");
    ASSERT_EQ(r.status, 0);
    const auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc["meta"]["version"], "0.1.0");
    EXPECT_EQ(doc["meta"]["command"], "scan");
    ASSERT_EQ(doc["rows"].size(), 7u);
    EXPECT_EQ(doc["rows"][0]["re_c1"].get<double>(), 0.5);
    EXPECT_EQ(doc["rows"][0]["status"], "ok");
    EXPECT_EQ(doc["summary"]["failed_points"], 0);
    // Values survive the round trip through 17 significant digits.
    const auto csv = csv_rows(run_cli("scan --beta 2 --points 7").out);
    for (std::size_t i = 0; i < 7; ++i)
        EXPECT_EQ(doc["rows"][i]["im_c1"].get<double>(), std::stod(csv[i][2]));
}

TEST(CliScan, PartialFailureExitsThree) {
    ringcorr::SummationPolicy direct;
    direct.representation = ringcorr::Representation::Direct;
    const auto cap = ringcorr::F_kernel(0.5, 0.0, direct).terms_used;
    const RunResult r = run_cli("scan --beta 0.5 --rep direct --tmin 0 --tmax 3.141592653589793 --points 2 "
                                "--max-terms " + std::to_string(cap));
    EXPECT_EQ(r.status, 3);
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].back(), "ok");
    EXPECT_EQ(rows[1].back().rfind("error:", 0), 0u);
    EXPECT_EQ(rows[1][1], "nan");
    EXPECT_EQ(summary_value(r.out, "failed_points"), "1");

    const RunResult j = run_cli("scan --beta 0.5 --rep direct --tmin 0 --tmax 3.141592653589793 --points 2 "
                                "--format json --max-terms " + std::to_string(cap));
    EXPECT_EQ(j.status, 3);
    EXPECT_TRUE(nlohmann::json::parse(j.out)["rows"][1]["re_c1"].is_null());
}

TEST(CliKms, DefaultResidualsSmall) {
    const RunResult r = run_cli("kms --beta 2");
    ASSERT_EQ(r.status, 0);
    EXPECT_LE(std::stod(summary_value(r.out, "max_r1")), 1e-10);
    EXPECT_LE(std::stod(summary_value(r.out, "max_r2")), 1e-10);
    EXPECT_EQ(csv_rows(r.out).size(), 64u);
}

TEST(CliLimit, SlopeNearOne) {
    const RunResult r = run_cli("limit --mass 1 --radius 1 --beta 1 --hbar 1");
    ASSERT_EQ(r.status, 0);
    EXPECT_EQ(csv_rows(r.out).size(), 11u);
    EXPECT_NEAR(std::stod(summary_value(r.out, "slope")), 1.0, 0.1);
}

TEST(CliMc, AgreesWithClosedForm) {
    const RunResult r = run_cli("mc --beta 0.7 --mass 1.2 --radius 0.9 --samples 1000000 --seed 5");
    ASSERT_EQ(r.status, 0);
    EXPECT_EQ(csv_rows(r.out).size(), 21u);
    EXPECT_GE(std::stoi(summary_value(r.out, "within_3se")), 19);
    EXPECT_EQ(run_cli("mc --beta 1 --samples 1000 --seed 5").out, run_cli("mc --beta 1 --samples 1000 --seed 5").out);
    EXPECT_NE(run_cli("mc --beta 1 --samples 1000 --seed 5").out, run_cli("mc --beta 1 --samples 1000 --seed 6").out);
}

TEST(CliSelftest, Passes) {
    const RunResult r = run_cli("selftest");
    EXPECT_EQ(r.status, 0) << r.out;
    EXPECT_EQ(summary_value(r.out, "failed"), "0");
}

TEST(CliLibrary, RunWritesToStreams) {
    ringcorr::cli::RunConfig c;
    c.command = ringcorr::cli::Command::Info;
    std::ostringstream out, err;
    EXPECT_EQ(ringcorr::cli::run(c, out, err), 2);
    EXPECT_NE(err.str().find("--beta"), std::string::npos);
    c.beta = 2.0;
    out.str("");
    EXPECT_EQ(ringcorr::cli::run(c, out, err), 0);
    EXPECT_NE(out.str().find("alpha,2\n"), std::string::npos);
}
