#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kCli = SFA_CLI_PATH;
const std::string kData = SFA_DATA_DIR;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("sfa_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args) {
    std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

const char* kRegularBoundary5 =
    "1.5707963267948966 1.5707963267948966\n"
    "1.5707963267948966 1.5707963267948966\n"
    "1.5707963267948966 1.5707963267948966\n"
    "1.5707963267948966 1.5707963267948966\n"
    "1.5707963267948966 1.5707963267948966\n";

}  // namespace

TEST_CASE("vertex command emits the normalized table") {
    TempDir tmp;
    std::string out = tmp.file("w.json");
    REQUIRE(run_cli("vertex --out " + out) == 0);
    json j = json::parse(slurp(out));
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 32);
    double denom = 8.0 * std::sqrt(42.0);
    CHECK(j[0][0].get<double>() == doctest::Approx(3.0 * std::sqrt(3.0) / denom).epsilon(1e-12));
    CHECK(j[0][1].get<double>() == 0.0);
    double norm = 0.0;
    for (const auto& pair : j) {
        norm += pair[0].get<double>() * pair[0].get<double>() +
                pair[1].get<double>() * pair[1].get<double>();
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("amplitude command on the all-zero boundary") {
    TempDir tmp;
    std::string boundary = tmp.file("b.txt");
    write_file(boundary, "0 0\n0 0\n0 0\n0 0\n0 0\n");
    std::string out = tmp.file("amp.json");
    REQUIRE(run_cli("amplitude --boundary " + boundary + " --out " + out) == 0);
    json j = json::parse(slurp(out));
    double expected = std::pow(3.0 * std::sqrt(3.0) / (8.0 * std::sqrt(42.0)), 2);
    CHECK(j["probability"].get<double>() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(j["amplitude_im"].get<double>() == doctest::Approx(0.0));
}

TEST_CASE("amplitude command validates row counts") {
    TempDir tmp;
    std::string boundary = tmp.file("b8.txt");
    std::string rows;
    for (int i = 0; i < 8; ++i) rows += "0.3 0.4\n";
    write_file(boundary, rows);
    CHECK(run_cli("amplitude --boundary " + boundary) != 0);
    std::string out = tmp.file("amp8.json");
    CHECK(run_cli("amplitude --two-vertex --boundary " + boundary + " --out " + out) == 0);
    json j = json::parse(slurp(out));
    CHECK(j.contains("probability"));

    std::string bad = tmp.file("bad.txt");
    write_file(bad, "0.1 0.2\nnot numbers\n");
    CHECK(run_cli("amplitude --boundary " + bad) != 0);
}

TEST_CASE("scan command emits the exact header and grid") {
    TempDir tmp;
    std::string out = tmp.file("scan.csv");
    REQUIRE(run_cli("scan --mode single --theta-grid 5 --phi-grid 7 --out " + out) == 0);
    std::string text = slurp(out);
    CHECK(text.rfind("theta,phi,probability,amplitude_re,amplitude_im\n", 0) == 0);
    int lines = 0;
    for (char ch : text) lines += ch == '\n' ? 1 : 0;
    CHECK(lines == 1 + 5 * 7);

    std::string out2 = tmp.file("scan2.csv");
    REQUIRE(run_cli("scan --mode double --theta-grid 9 --out " + out2) == 0);
    std::string text2 = slurp(out2);
    int lines2 = 0;
    for (char ch : text2) lines2 += ch == '\n' ? 1 : 0;
    CHECK(lines2 == 1 + 2 * 9);
}

TEST_CASE("scan argmax lands on the regular point") {
    TempDir tmp;
    std::string out = tmp.file("scan.csv");
    REQUIRE(run_cli("scan --mode single --theta-grid 101 --phi-grid 101 --out " + out) == 0);
    std::ifstream in(out);
    std::string line;
    std::getline(in, line);  // header
    double best_p = -1.0, best_theta = 0.0, best_phi = 0.0;
    while (std::getline(in, line)) {
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double theta, phi, p, re, im;
        ss >> theta >> phi >> p >> re >> im;
        if (p > best_p) {
            best_p = p;
            best_theta = theta;
            best_phi = phi;
        }
    }
    CHECK(best_theta == doctest::Approx(1.5707963267948966).epsilon(1e-9));
    CHECK(best_phi == doctest::Approx(1.5707963267948966).epsilon(1e-9));
    CHECK(best_p == doctest::Approx(1.0 / 7.0).epsilon(1e-9));
}

TEST_CASE("optimize command is deterministic and validates depth") {
    TempDir tmp;
    std::string out1 = tmp.file("s1.json"), out2 = tmp.file("s2.json");
    std::string base = "optimize --layers 1 --couplings " + kData +
                       "/couplings_single.json --seed 7 --restarts 2 --max-iterations 50";
    REQUIRE(run_cli(base + " --out " + out1) == 0);
    REQUIRE(run_cli(base + " --out " + out2) == 0);
    CHECK(slurp(out1) == slurp(out2));
    json j = json::parse(slurp(out1));
    CHECK(j["metadata"]["fidelity"].get<double>() > 0.0);
    CHECK(j["layers"].size() == 1);

    CHECK(run_cli("optimize --layers 0 --couplings " + kData +
                  "/couplings_single.json --seed 1") != 0);
}

TEST_CASE("simulate command runs the empty schedule") {
    TempDir tmp;
    std::string sched = tmp.file("empty.json");
    write_file(sched, R"({"init": [], "layers": []})");
    std::string boundary = tmp.file("b.txt");
    write_file(boundary, "0 0\n0 0\n0 0\n0 0\n0 0\n");
    std::string out = tmp.file("sim.json");
    REQUIRE(run_cli("simulate --schedule " + sched + " --boundary " + boundary + " --out " + out) ==
            0);
    json j = json::parse(slurp(out));
    CHECK(j["all_zero_probability"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));

    // mismatched boundary size
    std::string bad = tmp.file("b3.txt");
    write_file(bad, "0 0\n0 0\n0 0\n");
    CHECK(run_cli("simulate --schedule " + sched + " --boundary " + bad) != 0);

    // schedule with layers requires couplings
    std::string sched2 = tmp.file("layered.json");
    write_file(sched2, R"({"init": [], "layers": [{"tau_ns": 100.0, "gates": []}]})");
    write_file(boundary, kRegularBoundary5);
    CHECK(run_cli("simulate --schedule " + sched2 + " --boundary " + boundary) != 0);
    CHECK(run_cli("simulate --schedule " + sched2 + " --boundary " + boundary + " --couplings " +
                  kData + "/couplings_single.json --out " + tmp.file("sim2.json")) == 0);
}

TEST_CASE("fixture schedule reproduces the contraction through the CLI") {
    TempDir tmp;
    std::string out = tmp.file("sim.json");
    std::string boundary = tmp.file("b.txt");
    write_file(boundary, kRegularBoundary5);
    REQUIRE(run_cli("simulate --schedule " + kData + "/schedule_w_d4.json --couplings " + kData +
                    "/couplings_single.json --boundary " + boundary + " --out " + out) == 0);
    json j = json::parse(slurp(out));
    CHECK(j["fidelity_w"].get<double>() >= 0.99);
    // all-zero probability approximates |<Phi|W>|^2 = 1/7
    CHECK(std::abs(j["all_zero_probability"].get<double>() - 1.0 / 7.0) <= 1e-3);

    std::string amp_out = tmp.file("amp.json");
    REQUIRE(run_cli("amplitude --boundary " + boundary + " --out " + amp_out) == 0);
    json a = json::parse(slurp(amp_out));
    CHECK(std::abs(j["all_zero_probability"].get<double>() -
                   a["probability"].get<double>()) <= 1e-3);
}

TEST_CASE("mc command output and determinism") {
    TempDir tmp;
    std::string normals = tmp.file("n.txt");
    const double s = 1.0 / std::sqrt(3.0);
    std::ostringstream rows;
    rows.precision(17);
    for (int e = 0; e < 5; ++e) {
        rows << s << " " << s << " " << s << "\n";
        rows << s << " " << -s << " " << -s << "\n";
        rows << -s << " " << s << " " << -s << "\n";
        rows << -s << " " << -s << " " << s << "\n";
    }
    write_file(normals, rows.str());

    std::string out1 = tmp.file("mc1.json"), out2 = tmp.file("mc2.json");
    std::string base = "mc --normals " + normals + " --samples 20000 --seed 3";
    REQUIRE(run_cli(base + " --out " + out1) == 0);
    REQUIRE(run_cli(base + " --threads 4 --out " + out2) == 0);
    CHECK(slurp(out1) == slurp(out2));
    json j = json::parse(slurp(out1));
    CHECK(j.contains("estimate_re"));
    CHECK(j.contains("std_error"));
    CHECK(std::abs(j["empirical_Z"].get<double>() - 0.62361) < 0.1);

    // at 1e6 samples the measured normalization lands within 1% of 0.62361
    std::string outz = tmp.file("mcz.json");
    REQUIRE(run_cli("mc --normals " + normals +
                    " --samples 1000000 --seed 20240 --threads 4 --out " + outz) == 0);
    double z = json::parse(slurp(outz))["empirical_Z"].get<double>();
    CHECK(std::abs(z - 0.62361) / 0.62361 <= 0.01);

    // std_error scales like 1/sqrt(N): quadrupling N roughly halves it
    std::string out4 = tmp.file("mc4.json");
    REQUIRE(run_cli("mc --normals " + normals + " --samples 80000 --seed 3 --out " + out4) == 0);
    double se1 = j["std_error"].get<double>();
    double se4 = json::parse(slurp(out4))["std_error"].get<double>();
    CHECK(se4 < se1);
    CHECK(std::abs(se1 / se4 - 2.0) < 0.4);  // within 20% of the sqrt scaling

    // validation: too few samples, malformed normals
    CHECK(run_cli("mc --normals " + normals + " --samples 10 --seed 1") != 0);
    write_file(normals, "0 0 1\n");
    CHECK(run_cli("mc --normals " + normals + " --samples 2000 --seed 1") != 0);
}

TEST_CASE("failed commands leave no partial output") {
    TempDir tmp;
    std::string missing = tmp.file("missing.txt");
    std::string out = tmp.file("never.json");
    CHECK(run_cli("amplitude --boundary " + missing + " --out " + out) != 0);
    CHECK(!fs::exists(out));
}
