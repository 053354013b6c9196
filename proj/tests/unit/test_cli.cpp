#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using catastrophe::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) v.push_back(line);
    return v;
}

class TempDir {
  public:
    TempDir() : path_(fs::temp_directory_path() / ("catastrophe_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++))) {
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

  private:
    static inline int counter_ = 0;
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Cli, RateTable) {
    const auto r = call({"rate", "--which", "Jk", "--lambda", "1", "--mu", "1", "--alpha", "1", "--k", "1", "--x-grid", "0:3:0.5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 8u);
    EXPECT_EQ(rows[0], "x,rate");
    EXPECT_EQ(rows[4].substr(0, 4), "1.5,");
    EXPECT_NEAR(std::stod(rows[4].substr(4)), 1.147918, 1e-6);
}

TEST(Cli, RateNegativeGridIsInfinite) {
    const auto r = call({"rate", "--which", "I2", "--x-grid", "-1:0:1"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(lines(r.out)[1], "-1,inf");
}

TEST(Cli, ExactPointMass) {
    const auto r = call({"exact", "--t", "0", "--init", "4", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    const auto& w = j.at("result").at("weights");
    ASSERT_EQ(w.size(), 5u);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(w[i].get<double>(), 0.0);
    EXPECT_GT(w[4].get<double>(), 0.0);
}

TEST(Cli, ExactTail) {
    const auto r = call({"exact", "--t", "1", "--tail", "10", "--lambda", "1000000"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], "threshold,log_tail,log_truncation_mass,log_certified_bound");
}

TEST(Cli, MissingRequiredFlag) {
    const auto r = call({"exact"});
    EXPECT_EQ(r.code, catastrophe::cli::kUsage);
    const auto err = lines(r.err);
    ASSERT_EQ(err.size(), 2u);
    EXPECT_EQ(err[0].rfind("error code=2 kind=usage", 0), 0u);
    EXPECT_EQ(err[1].rfind("usage:", 0), 0u);
    EXPECT_TRUE(r.out.empty());
}

TEST(Cli, NoSubcommand) {
    EXPECT_EQ(call({}).code, catastrophe::cli::kUsage);
    EXPECT_EQ(call({"--seed", "3"}).code, catastrophe::cli::kUsage);
}

TEST(Cli, Help) {
    const auto r = call({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("simulate"), std::string::npos);
}

TEST(Cli, InvalidParameters) {
    const auto r = call({"--lambda", "0", "rate", "--which", "I1", "--x-grid", "0:1:1"});
    EXPECT_EQ(r.code, catastrophe::cli::kUsage);
    EXPECT_NE(r.err.find("lambda must be positive"), std::string::npos);
    EXPECT_EQ(call({"rate", "--which", "I1", "--x-grid", "0:1"}).code, catastrophe::cli::kUsage);
    EXPECT_EQ(call({"rate", "--which", "nope", "--x-grid", "0:1:1"}).code, catastrophe::cli::kUsage);
}

TEST(Cli, TruncationFailure) {
    const auto r = call({"exact", "--t", "50", "--n-states", "10"});
    EXPECT_EQ(r.code, catastrophe::cli::kTruncation);
    EXPECT_EQ(lines(r.err).size(), 1u);
}

TEST(Cli, OutputFailure) {
    const auto r = call({"--output", "/nonexistent-dir/x.csv", "rate", "--which", "I2", "--x-grid", "0:1:1"});
    EXPECT_EQ(r.code, catastrophe::cli::kIo);
}

TEST(Cli, MissingConfigFile) {
    EXPECT_EQ(call({"--config", "/nonexistent-dir/c.json", "rate", "--which", "I2", "--x-grid", "0:1:1"}).code,
              catastrophe::cli::kIo);
}

TEST(Cli, ConfigFileAndOverride) {
    TempDir dir;
    const fs::path cfg = dir.path() / "cfg.json";
    std::ofstream(cfg) << R"({"lambda": 2, "rate": {"which": "I1", "x-grid": "0:1:0.5"}})";
    const auto from_file = call({"--config", cfg.string()});
    ASSERT_EQ(from_file.code, 0) << from_file.err;
    EXPECT_EQ(lines(from_file.out).size(), 4u);
    EXPECT_NEAR(std::stod(lines(from_file.out)[3].substr(2)), std::log(1.5), 1e-15);

    const auto overridden = call({"--config", cfg.string(), "--lambda", "1"});
    ASSERT_EQ(overridden.code, 0);
    EXPECT_NEAR(std::stod(lines(overridden.out)[3].substr(2)), std::log(2.0), 1e-15);
}

TEST(Cli, ConfigRejectsUnknownFields) {
    TempDir dir;
    const fs::path cfg = dir.path() / "cfg.json";
    std::ofstream(cfg) << R"({"lamda": 2})";
    const auto r = call({"--config", cfg.string(), "rate", "--which", "I2", "--x-grid", "0:1:1"});
    EXPECT_EQ(r.code, catastrophe::cli::kUsage);
    EXPECT_NE(r.err.find("lamda"), std::string::npos);

    std::ofstream(cfg) << R"({"rate": {"wich": "I2"}})";
    EXPECT_EQ(call({"--config", cfg.string()}).code, catastrophe::cli::kUsage);
    std::ofstream(cfg) << "not json";
    EXPECT_EQ(call({"--config", cfg.string()}).code, catastrophe::cli::kUsage);
}

TEST(Cli, JsonConfigRoundTrip) {
    TempDir dir;
    for (const std::vector<std::string>& args :
         {std::vector<std::string>{"--seed", "7", "--format", "json", "simulate", "--horizon", "5", "--sampler", "decomposed"},
          {"--format", "json", "simulate", "--horizon", "20", "--replicas", "500"},
          {"--format", "json", "couple", "--x0", "0", "--y0", "5", "--horizon", "10", "--replicas", "3"},
          {"--format", "json", "--tol", "1e-10", "verify", "--check", "curve", "--x", "1.5", "--T", "10", "20"},
          {"--format", "json", "verify", "--check", "is", "--x", "1", "--T", "20", "--n", "500"}}) {
        const auto first = call(args);
        ASSERT_EQ(first.code, 0) << first.err;
        const auto j = nlohmann::json::parse(first.out);
        const fs::path cfg = dir.path() / "echo.json";
        std::ofstream(cfg) << j.at("config").dump();
        const auto second = call({"--config", cfg.string()});
        ASSERT_EQ(second.code, 0) << second.err;
        EXPECT_EQ(first.out, second.out);
    }
}

TEST(Cli, OutputDirectoryFromEnvironment) {
    TempDir dir;
    ::setenv("CATASTROPHE_OUTPUT_DIR", dir.path().c_str(), 1);
    const auto a = call({"rate", "--which", "I2", "--x-grid", "0:1:1"});
    const auto b = call({"--output", "named.csv", "rate", "--which", "I2", "--x-grid", "0:1:1"});
    ::unsetenv("CATASTROPHE_OUTPUT_DIR");
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    EXPECT_TRUE(a.out.empty());
    EXPECT_EQ(slurp(dir.path() / "rate.csv"), "x,rate\n0,0\n1,1\n");
    EXPECT_EQ(slurp(dir.path() / "named.csv"), "x,rate\n0,0\n1,1\n");
    EXPECT_EQ(std::distance(fs::directory_iterator(dir.path()), fs::directory_iterator{}), 2);
}

TEST(Cli, SimulateOutputs) {
    const auto path = call({"simulate", "--horizon", "10", "--init", "3"});
    ASSERT_EQ(path.code, 0);
    EXPECT_EQ(lines(path.out)[0], "time,state");
    EXPECT_EQ(lines(path.out)[1], "0,3");
    const auto hist = call({"simulate", "--horizon", "10", "--replicas", "1000"});
    ASSERT_EQ(hist.code, 0);
    double total = 0;
    const auto rows = lines(hist.out);
    for (std::size_t i = 1; i < rows.size(); ++i) total += std::stod(rows[i].substr(rows[i].find(',') + 1));
    EXPECT_EQ(total, 1000.0);
}

TEST(Cli, CoupleReport) {
    const auto r = call({"--format", "json", "couple", "--x0", "0", "--y0", "5", "--horizon", "10", "--replicas", "200"});
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("result").at("violations"), 0);
    EXPECT_LE(j.at("result").at("worst_discrepancy").get<int>(), 5);
}

TEST(Cli, Bounds) {
    const auto poisson = call({"bounds", "--bound", "poisson-lower", "--beta", "1", "--z", "0.5", "--u", "0.5"});
    ASSERT_EQ(poisson.code, 0);
    EXPECT_EQ(lines(poisson.out)[0], "beta,z,u,log_bound,log_exact");
    const auto sum = call({"bounds", "--bound", "catastrophe-sum", "--a", "0.1", "--v", "1", "--delta", "1", "--phi", "10"});
    ASSERT_EQ(sum.code, 0);
    EXPECT_NE(lines(sum.out)[1].find("-21.02"), std::string::npos);
    EXPECT_EQ(call({"bounds", "--bound", "catastrophe-sum", "--v", "0.01"}).code, catastrophe::cli::kUsage);
}

TEST(Cli, VerifyChecks) {
    const auto sw = call({"verify", "--check", "sandwich", "--x", "1.5", "--T", "25", "100"});
    ASSERT_EQ(sw.code, 0) << sw.err;
    const auto rows = lines(sw.out);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[1].back(), '1');
    EXPECT_EQ(rows[2].back(), '1');
    const auto lln = call({"verify", "--check", "lln", "--a", "0.5", "--T", "100", "--n", "200", "--workers", "2"});
    ASSERT_EQ(lln.code, 0) << lln.err;
    const auto bad = call({"verify", "--check", "lln", "--T", "100"});
    EXPECT_EQ(bad.code, catastrophe::cli::kUsage);
}
