#include "kmcoh/harness.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace kmcoh;

namespace {

SuiteConfig config(const std::string& suite, int E, int P) {
    SuiteConfig c;
    c.suite = suite;
    c.max_energy = E;
    c.max_degree = P;
    return c;
}

std::string render(const std::vector<ReportRecord>& r, ReportFormat f) {
    std::ostringstream os;
    emit_report(r, f, os);
    return os.str();
}

int cli(const std::string& args) {
    std::string cmd = std::string(KMCOH_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Harness, CutoffZeroIsTheVacuumSlice) {
    auto r = run_suite(config("classical-vacuum", 0, 2));
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0].p, 0);
    EXPECT_EQ(r.records[0].energy, 0);
    EXPECT_EQ(r.records[0].dim, 1);
    EXPECT_TRUE(r.passed());
}

TEST(Harness, ClassicalVacuumMatches) {
    auto r = run_suite(config("classical-vacuum", 5, 2));
    EXPECT_TRUE(r.passed());
    EXPECT_GT(r.records.size(), 5u);
}

TEST(Harness, GenericVacuumVanishes) {
    auto c = config("quantum-vacuum-generic", 5, 2);
    c.level = parse_level("generic:1");
    auto r = run_suite(c);
    EXPECT_TRUE(r.passed());
    for (auto& x : r.records)
        if (x.p > 0) EXPECT_EQ(x.dim, 0);
}

TEST(Harness, EmptyReportIsEmptyArray) { EXPECT_EQ(render({}, ReportFormat::Json), "[]\n"); }

TEST(Harness, RecordSchema) {
    auto r = run_suite(config("classical-vacuum", 0, 0));
    auto j = nlohmann::ordered_json::parse(render(r.records, ReportFormat::Json));
    ASSERT_EQ(j.size(), 1u);
    std::vector<std::string> keys;
    for (auto& [k, v] : j[0].items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"pair", "module", "p", "energy", "weight", "dim", "expected", "match"}));
}

TEST(Harness, TsvAndJsonAgree) {
    auto r = run_suite(config("absolute-vs-relative", 3, 4));
    std::istringstream tsv(render(r.records, ReportFormat::Tsv));
    auto a = parse_tsv_report(tsv);
    auto b = parse_json_report(nlohmann::json::parse(render(r.records, ReportFormat::Json)));
    EXPECT_EQ(a, r.records);
    EXPECT_EQ(b, r.records);
}

TEST(Harness, ReportsAreDeterministic) {
    for (auto s : {"quantum-vacuum-critical", "oper-roundtrip"}) {
        auto c = config(s, 4, 1);
        EXPECT_EQ(render(run_suite(c).records, ReportFormat::Json), render(run_suite(c).records, ReportFormat::Json)) << s;
    }
}

TEST(Harness, RecordsAreSorted) {
    auto r = run_suite(config("deformation", 2, 2));
    EXPECT_TRUE(std::is_sorted(r.records.begin(), r.records.end()));
}

TEST(Harness, ConfigurationErrors) {
    EXPECT_THROW(run_suite(config("no-such-suite", 2, 1)), ConfigError);
    EXPECT_THROW(run_suite(config("classical-vacuum", -1, 1)), ConfigError);
    auto c = config("classical-vacuum", 2, 1);
    c.algebra = "g2";
    EXPECT_THROW(run_suite(c), ConfigError);
    c = config("classical-vacuum", 2, 1);
    c.weight = std::vector<Rational>{Rational(1)};
    EXPECT_THROW(run_suite(c), ConfigError);
    c = config("quantum-verma-critical", 2, 1);
    c.weight = std::vector<Rational>{frac(1, 2)};
    EXPECT_THROW(run_suite(c), ConfigError);
    c = config("quantum-vacuum-generic", 2, 1);
    c.level = LevelSpec{};
    EXPECT_THROW(run_suite(c), ConfigError);
    EXPECT_THROW(parse_level("generic:0"), ConfigError);
    EXPECT_THROW(parse_level("noncritical"), ConfigError);
    EXPECT_THROW(parse_weight("x"), ConfigError);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(cli("verify classical-vacuum --algebra sl2 --max-energy 3 --max-degree 1"), 0);
    EXPECT_EQ(cli("verify quantum-vacuum-generic --algebra sl2 --max-energy 3 --max-degree 2 --level generic:-2"), 0);
    EXPECT_EQ(cli("verify classical-vacuum --algebra sl7 --max-energy 3 --max-degree 1"), 2);
    EXPECT_EQ(cli("verify classical-vacuum --algebra sl2 --max-energy 3"), 2);
    EXPECT_EQ(cli("verify classical-verma --algebra sl2 --max-energy 3 --max-degree 1 --weight 1/3"), 2);
    EXPECT_EQ(cli("verify classical-vacuum --algebra sl2 --max-energy 1 --max-degree 1 --format xml --report /dev/null"), 2);
    EXPECT_EQ(cli("dims --series OmegaC --algebra sl3 --max-energy 4"), 0);
    EXPECT_EQ(cli("dims --series Nope --algebra sl3 --max-energy 4"), 2);
    EXPECT_EQ(cli("oper canonicalize --algebra sl2 --precision 4 --input " + std::string(KMCOH_SAMPLES_DIR) + "/sl2_oper.json"), 0);
    EXPECT_EQ(cli("oper canonicalize --algebra sl2 --precision 5 --input " + std::string(KMCOH_SAMPLES_DIR) + "/sl2_oper.json"), 2);
}

// a verification mismatch is exit 1: the composite homotopy sample does not hold
TEST(Cli, MismatchExitCode) { EXPECT_EQ(cli("verify vertex-identities --algebra sl2 --max-energy 2 --max-degree 1"), 1); }

TEST(Cli, ReportFileMatchesLibrary) {
    std::string path = ::testing::TempDir() + "kmcoh_report.tsv";
    ASSERT_EQ(cli("verify classical-verma --algebra sl2 --max-energy 3 --max-degree 1 --weight 1 --format tsv --report " + path), 0);
    std::ifstream in(path);
    auto got = parse_tsv_report(in);
    auto c = config("classical-verma", 3, 1);
    c.weight = std::vector<Rational>{Rational(1)};
    EXPECT_EQ(got, run_suite(c).records);
}
