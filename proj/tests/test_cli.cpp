#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run udnet_run(std::vector<std::string> args) {
    args.insert(args.begin(), "udnet");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = udnet::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

// RFC 4180 cells: quoted cells may hold commas and doubled quotes
std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cells.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cells.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.emplace_back();
        } else {
            cells.back() += c;
        }
    }
    return cells;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
}

std::string temp_file(const std::string& name, const std::string& content) {
    const auto p = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream(p) << content;
    return p;
}

double num(const json& row, const std::string& key) { return row.at(key).at("value").get<double>(); }

}  // namespace

TEST_CASE("bounds command") {
    const auto r = udnet_run({"bounds", "--d", "2", "--eps", "0.1", "--delta", "1e-12"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["command"] == "bounds");
    CHECK(j["config"]["seed"] == 0);
    const auto& row = j["results"][0];
    CHECK(num(row, "t_min") == doctest::Approx(8821.80).epsilon(1e-6));
    CHECK(num(row, "log10_delta_max.theorem") == doctest::Approx(-10.09).epsilon(1e-3));
    CHECK(num(row, "log10_delta_max.kappa") >= num(row, "log10_delta_max.theorem"));
    CHECK(row["t_min"]["provenance"] == "closed-form");
    CHECK(row.contains("ell"));
    CHECK(row.contains("sigma_star"));

    const auto bad = udnet_run({"bounds", "--d", "2", "--eps", "3"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("--eps") != std::string::npos);
    CHECK(bad.err.find("(0, 2]") != std::string::npos);
    CHECK(udnet_run({"bounds", "--d", "1", "--eps", "0.1"}).code == 2);
    CHECK(udnet_run({"bounds", "--d", "2"}).code == 2);
}

TEST_CASE("CSV is a lossless projection of the JSON") {
    const auto js = json::parse(udnet_run({"bounds", "--d", "3", "--eps", "0.37"}).out);
    const auto csv = lines(udnet_run({"bounds", "--d", "3", "--eps", "0.37", "--format", "csv"}).out);
    REQUIRE(csv.size() == 2);
    const auto head = split(csv[0]), row = split(csv[1]);
    REQUIRE(head.size() == row.size());
    int numbers = 0;
    for (std::size_t i = 0; i < head.size(); ++i) {
        const auto& key = head[i];
        if (key.rfind("config.", 0) == 0 || key.find(".provenance") != std::string::npos) continue;
        REQUIRE(js["results"][0].contains(key));
        CHECK(std::stod(row[i]) == num(js["results"][0], key));
        ++numbers;
    }
    CHECK(numbers >= 8);
}

TEST_CASE("kernel command") {
    auto r = udnet_run({"kernel", "--d", "2", "--sigma", "0.2", "--phi", "0.3", "--form", "both"});
    REQUIRE(r.code == 0);
    auto row = json::parse(r.out)["results"][0];
    CHECK(num(row, "relative_discrepancy") <= 1e-7);
    CHECK(row["char.value"]["provenance"] == "plancherel");
    CHECK(row["poisson.value"]["provenance"] == "closed-form");
    r = udnet_run({"kernel", "--d", "3", "--sigma", "0.4", "--phi", "0.2,1.1", "--trim-t", "0"});
    REQUIRE(r.code == 0);
    CHECK(num(json::parse(r.out)["results"][0], "char.value") == 1.0);
    CHECK(udnet_run({"kernel", "--d", "2", "--sigma", "0", "--phi", "0.3"}).code == 2);
    CHECK(udnet_run({"kernel", "--d", "3", "--sigma", "0.2", "--phi", "0.3"}).code == 2);
    const auto trunc = udnet_run({"kernel", "--d", "4", "--sigma", "1e-9", "--form", "char"});
    CHECK(trunc.code == 3);
}

TEST_CASE("validate command") {
    auto r = udnet_run({"validate", "--suite", "orthonormality", "--d", "2"});
    CHECK(r.code == 0);
    auto res = json::parse(r.out)["results"];
    REQUIRE(res.size() >= 1);
    CHECK(res[0]["status"] == "pass");
    CHECK(num(res[0], "measured") <= 1e-6);
    CHECK(r.err.find("PASS") != std::string::npos);

    r = udnet_run({"validate", "--suite", "gue", "--d", "2", "--n", "1000000", "--seed", "7"});
    CHECK(r.code == 0);

    r = udnet_run({"validate", "--suite", "i0", "--d", "5"});
    CHECK(r.code == 0);
    res = json::parse(r.out)["results"];
    REQUIRE(res.size() >= 1);
    for (const auto& c : res) CHECK(c["status"] == "skipped: unsupported-dimension");
    r = udnet_run({"validate", "--suite", "orthonormality", "--d", "5"});
    for (const auto& c : json::parse(r.out)["results"]) CHECK(c["status"] == "skipped: unsupported-dimension");

    CHECK(udnet_run({"validate", "--suite", "nonsense"}).code == 2);
}

TEST_CASE("design-delta command") {
    auto r = udnet_run({"design-delta", "--gateset", "builtin:pauli", "--t", "2"});
    REQUIRE(r.code == 0);
    auto rows = json::parse(r.out)["results"];
    REQUIRE(rows.size() == 2);
    CHECK(num(rows[0], "delta") <= 1e-10);
    CHECK(num(rows[1], "delta") > 1e-3);

    r = udnet_run({"design-delta", "--gateset", "builtin:clifford24", "--t", "4"});
    REQUIRE(r.code == 0);
    rows = json::parse(r.out)["results"];
    REQUIRE(rows.size() == 4);
    for (int s = 0; s < 3; ++s) CHECK(num(rows[s], "delta") <= 1e-9);
    CHECK(num(rows[3], "delta") > 1e-3);

    const auto empty = temp_file("udnet_empty.json", R"({"d": 2, "elements": []})");
    CHECK(udnet_run({"design-delta", "--gateset", empty, "--t", "1"}).code == 2);
    const auto broken = temp_file("udnet_broken.json", R"({"d": 2, "elements": [)");
    CHECK(udnet_run({"design-delta", "--gateset", broken, "--t", "1"}).code == 2);
    std::filesystem::remove(empty);
    std::filesystem::remove(broken);
    CHECK(udnet_run({"design-delta", "--gateset", "builtin:pauli", "--t", "7"}).code == 4);
}

TEST_CASE("sweep command") {
    auto spec = temp_file("udnet_sweep1.json",
                          R"({"target": "trimming", "d": [2], "sigma": [0.5, 0.2, 0.1, 0.05], "t": ["auto"]})");
    auto r = udnet_run({"sweep", "--spec", spec});
    REQUIRE(r.code == 0);
    auto ls = lines(r.out);
    REQUIRE(ls.size() == 5);
    auto head = split(ls[0]);
    REQUIRE(split(ls[1]).size() == head.size());
    const auto col = [&](const std::string& k) {
        return static_cast<std::size_t>(std::find(head.begin(), head.end(), k) - head.begin());
    };
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto row = split(ls[i]);
        CHECK(std::stod(row[col("log_trimming_error")]) <= std::stod(row[col("log_bound_trim")]));
        CHECK(row[col("holds")] == "true");
    }

    spec = temp_file("udnet_sweep2.json", R"({"target": "delta_max", "d": [2, 3, 4], "eps": [0.5, 0.1, 0.01]})");
    r = udnet_run({"sweep", "--spec", spec});
    REQUIRE(r.code == 0);
    ls = lines(r.out);
    REQUIRE(ls.size() == 10);
    head = split(ls[0]);
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto row = split(ls[i]);
        CHECK(std::stod(row[col("log_delta_max.kappa")]) >= std::stod(row[col("log_delta_max.theorem")]));
    }

    spec = temp_file("udnet_sweep3.json", R"({"target": "t_min", "d": [2], "eps": []})");
    r = udnet_run({"sweep", "--spec", spec});
    CHECK(r.code == 0);
    CHECK(lines(r.out).size() == 1);

    spec = temp_file("udnet_sweep4.json", R"({"target": "t_min", "d": [2], "eps": [0.1], "colour": 1})");
    CHECK(udnet_run({"sweep", "--spec", spec}).code == 2);
    spec = temp_file("udnet_sweep4.json", R"({"target": "nothing", "d": [2]})");
    CHECK(udnet_run({"sweep", "--spec", spec}).code == 2);
    for (int i = 1; i <= 4; ++i)
        std::filesystem::remove(std::filesystem::temp_directory_path() / ("udnet_sweep" + std::to_string(i) + ".json"));
}

TEST_CASE("run conventions") {
    const std::vector<std::string> args{"validate", "--suite", "gue", "--d", "3", "--n", "20000", "--seed", "5"};
    const auto a = udnet_run(args), b = udnet_run(args);
    CHECK(a.out == b.out);
    CHECK(udnet_run({"bounds", "--d", "2", "--eps", "0.1", "--colour", "red"}).code == 2);
    CHECK(udnet_run({}).code == 2);

    setenv("UDNET_SEED", "5", 1);
    const auto env = udnet_run({"validate", "--suite", "gue", "--d", "3", "--n", "20000"});
    const auto flag = udnet_run({"validate", "--suite", "gue", "--d", "3", "--n", "20000", "--seed", "9"});
    unsetenv("UDNET_SEED");
    CHECK(env.out == a.out);
    CHECK(json::parse(flag.out)["config"]["seed"] == 9);

    const auto path = (std::filesystem::temp_directory_path() / "udnet_out.csv").string();
    const auto r = udnet_run({"bounds", "--d", "2", "--eps", "0.1", "--format", "csv", "--out", path});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    auto plain = udnet_run({"bounds", "--d", "2", "--eps", "0.1", "--format", "csv"}).out;
    plain.replace(plain.find(",csv,-,"), 7, ",csv," + path + ",");
    CHECK(ss.str() == plain);
    std::filesystem::remove(path);
}
