// End-to-end checks of the installed binary: each test shells out to the
// executable named by HOMEGUARD_CLI (set by CTest) inside a scratch directory.
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "homeguard/config.hpp"
#include "json.hpp"

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() /
              ("homeguard_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }

    void write(const std::string& name, const std::string& text) const {
        std::ofstream f(path(name), std::ios::binary);
        f << text;
    }

    std::string read(const std::string& name) const {
        std::ifstream f(path(name), std::ios::binary);
        REQUIRE_MESSAGE(f.good(), "missing file: " << name);
        std::ostringstream buf;
        buf << f.rdbuf();
        return buf.str();
    }

    bool exists(const std::string& name) const { return fs::exists(path(name)); }

    CliResult run(const std::string& args) const {
        const char* cli = std::getenv("HOMEGUARD_CLI");
        REQUIRE_MESSAGE(cli != nullptr, "HOMEGUARD_CLI not set");
        const std::string cmd = "cd '" + dir.string() + "' && '" + cli + "' " + args +
                                " > cli_out.txt 2> cli_err.txt";
        const int status = std::system(cmd.c_str());
        REQUIRE(status != -1);
        CliResult r;
        r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = read("cli_out.txt");
        r.err = read("cli_err.txt");
        return r;
    }
};

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

std::string default_requests(int count) {
    std::ostringstream out;
    out << "[";
    for (int i = 0; i < count; ++i) {
        if (i) out << ",";
        out << R"({"device_id":"device-)" << (i % 5) << R"(","x":)" << (0.25 + 0.3 * i)
            << R"(,"y":)" << (0.2 + 0.2 * i) << "}";
    }
    out << "]";
    return out.str();
}

// Default config with one section surgically altered; keeps the rest valid.
json default_config_json() {
    return json::parse(homeguard::config_to_json(homeguard::default_config()));
}

}  // namespace

TEST_CASE("simulate-rssi writes the sample table and the summary") {
    Scratch s;
    const auto r = s.run("simulate-rssi");
    CAPTURE(r.err);
    REQUIRE(r.exit_code == 0);

    // header + 3 profiles * 3 distances * 100 samples
    const std::string csv = s.read("rssi_samples.csv");
    CHECK(count_lines(csv) == 901);
    CHECK(csv.rfind("sample_index,", 0) == 0);

    const auto summary = json::parse(s.read("rssi_samples.json"));
    REQUIRE(summary.is_array());
    REQUIRE(summary.size() == 9);
    CHECK(summary[0].at("technology") == "WiFi");
    CHECK(summary[8].at("technology") == "BLE");
    for (const auto& cell : summary) {
        CHECK(cell.contains("rmse_raw"));
        CHECK(cell.contains("rmse_filtered"));
    }

    // one console line per cell
    CHECK(count_lines(r.out) == 9);
    CHECK(r.out.find("WiFi d=0.25") != std::string::npos);
}

TEST_CASE("simulate-rssi --format json skips the csv") {
    Scratch s;
    const auto r = s.run("simulate-rssi --format json --out only");
    REQUIRE(r.exit_code == 0);
    CHECK(s.exists("only.json"));
    CHECK_FALSE(s.exists("only.csv"));
}

TEST_CASE("simulate-rssi honors n_samples 1") {
    Scratch s;
    auto cfg = default_config_json();
    cfg["experiment"]["n_samples"] = 1;
    s.write("one.json", cfg.dump());
    const auto r = s.run("simulate-rssi --config one.json");
    CAPTURE(r.err);
    REQUIRE(r.exit_code == 0);
    CHECK(count_lines(s.read("rssi_samples.csv")) == 10);  // header + 9 cells
    CHECK(json::parse(s.read("rssi_samples.json")).size() == 9);
}

TEST_CASE("config missing a section is refused by name") {
    Scratch s;
    auto cfg = default_config_json();
    cfg.erase("anchors");
    s.write("broken.json", cfg.dump());
    const auto r = s.run("simulate-rssi --config broken.json");
    CHECK(r.exit_code != 0);
    CHECK(r.err.find("anchors") != std::string::npos);
}

TEST_CASE("run-access chains three blocks per request and verifies") {
    Scratch s;
    s.write("requests.json", default_requests(10));
    const auto r = s.run("run-access requests.json --out chain.json");
    CAPTURE(r.err);
    REQUIRE(r.exit_code == 0);
    CHECK(count_lines(r.out) == 10);

    const auto dump = json::parse(s.read("chain.json"));
    REQUIRE(dump.is_array());
    CHECK(dump.size() == 31);  // genesis + 3 per request
    CHECK(dump[0].at("index") == 0);

    const auto v = s.run("verify-chain chain.json");
    CHECK(v.exit_code == 0);
    CHECK(v.out.find("chain OK: 31 blocks") != std::string::npos);
}

TEST_CASE("run-access is reproducible under a fixed seed") {
    Scratch s;
    s.write("requests.json", default_requests(6));
    const auto r1 = s.run("run-access requests.json --seed 7 --out a.json");
    const auto r2 = s.run("run-access requests.json --seed 7 --out b.json");
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    CHECK(s.read("a.json") == s.read("b.json"));
    CHECK(r1.out == r2.out);

    const auto r3 = s.run("run-access requests.json --seed 8 --out c.json");
    REQUIRE(r3.exit_code == 0);
    CHECK(s.read("a.json") != s.read("c.json"));
}

TEST_CASE("run-access accepts an empty request list") {
    Scratch s;
    s.write("requests.json", "[]");
    const auto r = s.run("run-access requests.json --out chain.json");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.empty());
    CHECK(json::parse(s.read("chain.json")).size() == 1);  // genesis only
}

TEST_CASE("run-access rejects malformed request entries") {
    Scratch s;
    SUBCASE("missing coordinate") {
        s.write("requests.json", R"([{"device_id":"device-1","x":1.0}])");
        const auto r = s.run("run-access requests.json");
        CHECK(r.exit_code != 0);
        CHECK(r.err.find("requests[0]") != std::string::npos);
    }
    SUBCASE("empty device id") {
        s.write("requests.json", R"([{"device_id":"","x":1.0,"y":1.0}])");
        const auto r = s.run("run-access requests.json");
        CHECK(r.exit_code != 0);
        CHECK(r.err.find("device_id") != std::string::npos);
    }
    SUBCASE("second entry broken") {
        s.write("requests.json",
                R"([{"device_id":"device-1","x":1.0,"y":1.0},{"device_id":"device-2"}])");
        const auto r = s.run("run-access requests.json");
        CHECK(r.exit_code != 0);
        CHECK(r.err.find("requests[1]") != std::string::npos);
    }
}

TEST_CASE("verify-chain flags a tampered dump with its block index") {
    Scratch s;
    s.write("requests.json", default_requests(4));
    REQUIRE(s.run("run-access requests.json --out chain.json").exit_code == 0);

    auto dump = json::parse(s.read("chain.json"));
    std::string h = dump[5].at("hash").get<std::string>();
    h[10] = h[10] == 'f' ? 'e' : 'f';
    dump[5]["hash"] = h;
    s.write("bad.json", dump.dump(2));

    const auto r = s.run("verify-chain bad.json");
    CHECK(r.exit_code != 0);
    CHECK(r.out.find("chain INVALID at block 5") != std::string::npos);
}

TEST_CASE("verify-chain reports unreadable input") {
    Scratch s;
    SUBCASE("truncated json") {
        s.write("trunc.json", R"([{"index": 0, "timestamp")");
        const auto r = s.run("verify-chain trunc.json");
        CHECK(r.exit_code != 0);
        CHECK_FALSE(r.err.empty());
    }
    SUBCASE("missing file") {
        const auto r = s.run("verify-chain nowhere.json");
        CHECK(r.exit_code != 0);
        CHECK(r.err.find("nowhere.json") != std::string::npos);
    }
}

TEST_CASE("bench-chain emits both latency reports") {
    Scratch s;
    const auto r = s.run("bench-chain --trials 3 --difficulty 0 --out lat.json");
    CAPTURE(r.err);
    REQUIRE(r.exit_code == 0);

    const auto report = json::parse(s.read("lat.json"));
    REQUIRE(report.is_array());
    REQUIRE(report.size() == 2);
    CHECK(report[0].at("mode") == "private");
    CHECK(report[1].at("mode") == "public");
    CHECK_FALSE(report[0].contains("difficulty"));
    CHECK(report[1].at("difficulty") == 0);
    CHECK(report[0].at("trials") == 3);
    CHECK(count_lines(r.out) == 2);
}

TEST_CASE("bench-chain refuses zero trials") {
    Scratch s;
    const auto r = s.run("bench-chain --trials 0");
    CHECK(r.exit_code != 0);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("missing config file is an error naming the path") {
    Scratch s;
    const auto r = s.run("simulate-rssi --config not_here.json");
    CHECK(r.exit_code != 0);
    CHECK(r.err.find("not_here.json") != std::string::npos);
}
