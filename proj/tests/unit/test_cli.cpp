#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"
#include "formats.hpp"
#include "ipmgen/ctwedge.hpp"

namespace fs = std::filesystem;
using namespace ipmgen;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string model(const std::string& name) { return std::string(IPMGEN_MODELS_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("ipmgen_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    fs::path dir;
};

}  // namespace

TEST_F(CliTest, GenerateUniformBoolean) {
    Outcome r = run({"generate", "--type", "UB", "--n", "2", "--k-min", "3", "--k-max", "3", "--out", dir.string(),
                 "--seed", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    for (int i = 0; i < 2; ++i) {
        const fs::path f = dir / ("UNIFORM_BOOLEAN_" + std::to_string(i) + ".ctw");
        ASSERT_TRUE(fs::exists(f));
        Ipm m = parseCtwedge(slurp(f));
        EXPECT_EQ(m.size(), 3u);
        for (const auto& p : m.parameters()) EXPECT_EQ(p.kind(), ParamKind::Boolean);
        EXPECT_TRUE(m.constraints().empty());
    }
    EXPECT_NE(r.err.find("UNIFORM_BOOLEAN_0: 3 parameters"), std::string::npos);
}

TEST_F(CliTest, GenerateIsDeterministic) {
    auto gen = [&](const std::string& sub) {
        fs::create_directories(dir / sub);
        Outcome r = run({"generate", "--type", "NC", "--n", "3", "--seed", "17", "--c-max", "3", "--out",
                     (dir / sub).string(), "--formats", "ctwedge,acts,pict"});
        EXPECT_EQ(r.code, 0) << r.err;
    };
    gen("a");
    gen("b");
    for (const auto& entry : fs::directory_iterator(dir / "a"))
        EXPECT_EQ(slurp(entry.path()), slurp(dir / "b" / entry.path().filename())) << entry.path();
    EXPECT_TRUE(fs::exists(dir / "a" / "NUMC_2.acts.txt"));
    EXPECT_TRUE(fs::exists(dir / "a" / "NUMC_2.pict.txt"));
    EXPECT_NO_THROW(formats::readPict(slurp(dir / "a" / "NUMC_0.pict.txt")));
}

TEST_F(CliTest, GenerateJsonReport) {
    Outcome r = run({"generate", "--type", "MC", "--n", "2", "--test-ratio", "0.9", "--tuple-ratio", "0.95", "--out",
                 dir.string(), "--json", "--seed", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = nlohmann::json::parse(r.out);
    ASSERT_EQ(j.size(), 2u);
    EXPECT_EQ(j[0]["model"], "MCAC_0");
    EXPECT_LE(j[0]["testRatio"]["value"].get<double>(), 0.9);
    for (const auto& m : j) {
        const auto& tp = m["tupleRatio"];
        EXPECT_LE((tp.contains("value") ? tp["value"] : tp["atMost"]).get<double>(), 0.95) << tp;
    }
    EXPECT_EQ(j[0]["files"].size(), 1u);
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({"generate"}).code, 1);
    EXPECT_EQ(run({"generate", "--type", "XX"}).code, 1);
    EXPECT_EQ(run({"generate", "--type", "UB", "--v-min", "3"}).code, 1);
    EXPECT_EQ(run({"generate", "--type", "MC", "--int-lower", "0"}).code, 1);
    EXPECT_EQ(run({"generate", "--type", "M", "--c-max", "3"}).code, 1);
    EXPECT_EQ(run({"generate", "--type", "BC", "--strength", "3"}).code, 1);
    EXPECT_EQ(run({"generate", "--type", "BC", "--prob", "0.9"}).code, 1);
    EXPECT_EQ(run({"generate", "--type", "BC", "--form", "dnf"}).code, 1);
    EXPECT_EQ(run({"generate", "--type", "BC", "--formats", "xml"}).code, 1);
    EXPECT_EQ(run({"generate", "--type", "BC", "--k-min", "5", "--k-max", "2"}).code, 1);
    Outcome r = run({"generate", "--type", "BC", "--tuple-ratio", "0.1"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("unreachable"), std::string::npos);
    EXPECT_EQ(run({"analyze", "/nonexistent.ctw"}).code, 1);
    EXPECT_EQ(run({"convert", model("example1.ctw"), "--to", "xml"}).code, 1);
    EXPECT_EQ(run({"ratio", model("example2.ctw"), "--method", "magic"}).code, 1);
}

TEST_F(CliTest, HelpExitsZero) {
    Outcome r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("generate"), std::string::npos);
}

TEST_F(CliTest, BadModelFileIsFailure) {
    std::ofstream(dir / "bad.ctw") << "Model m Parameters: a : Boolean Constraints: # b #";
    Outcome r = run({"analyze", (dir / "bad.ctw").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("bad.ctw"), std::string::npos);
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
    std::ofstream(dir / "cfg.json") << R"({"type": "MC", "n": 2, "k-min": 4, "k-max": 4, "seed": 3,
        "formats": ["ctwedge", "pict"], "name": "fromfile"})";
    Outcome r = run({"generate", "--config", (dir / "cfg.json").string(), "--k-min", "2", "--k-max", "2", "--out",
                 dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    Ipm m = parseCtwedge(slurp(dir / "fromfile_1.ctw"));
    EXPECT_EQ(m.size(), 2u);
    EXPECT_TRUE(fs::exists(dir / "fromfile_0.pict.txt"));

    std::ofstream(dir / "unknown.json") << R"({"type": "MC", "colour": 1})";
    EXPECT_EQ(run({"generate", "--config", (dir / "unknown.json").string()}).code, 1);
    std::ofstream(dir / "typed.json") << R"({"type": "MC", "n": "two"})";
    EXPECT_EQ(run({"generate", "--config", (dir / "typed.json").string()}).code, 1);
}

TEST_F(CliTest, BaselineSeedsConfig) {
    Outcome r = run({"generate", "--baseline", model("example1.ctw"), "--n", "10", "--out", dir.string(), "--seed", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("baseline"), std::string::npos);
    int count = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        Ipm m = parseCtwedge(slurp(entry.path()));
        EXPECT_EQ(m.size(), 4u);
        EXPECT_EQ(m.constraints().size(), 3u);
        ++count;
    }
    EXPECT_EQ(count, 10);
    EXPECT_EQ(run({"generate", "--baseline", model("example1.ctw"), "--type", "UB"}).code, 1);
}

TEST(Cli, RatioExactOnExample) {
    Outcome r = run({"ratio", model("example2.ctw")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("r_ts = 0.75 (9/12, exact-mdd)"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("r_tp(t=2) = 0.9375 (15/16)"), std::string::npos) << r.out;
    Outcome mc = run({"ratio", model("example2.ctw"), "--method", "mc", "--which", "test", "--test-ratio", "0.75",
                  "--seed", "5", "--json"});
    ASSERT_EQ(mc.code, 0) << mc.err;
    auto j = nlohmann::json::parse(mc.out);
    EXPECT_EQ(j["testRatio"]["method"], "monte-carlo");
    EXPECT_NEAR(j["testRatio"]["value"].get<double>(), 0.75, 0.075);
}

TEST(Cli, AnalyzeJson) {
    Outcome r = run({"analyze", model("example1.ctw"), "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["category"], "NC");
    EXPECT_EQ(j["parameters"], 4);
    EXPECT_EQ(j["constraints"], 3);
    EXPECT_EQ(j["integerBounds"]["min"], 2);
    EXPECT_EQ(j["complexity"]["max"], 2);
}

TEST_F(CliTest, Convert) {
    Outcome r = run({"convert", model("example2.ctw"), "--to", "acts"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(formats::readActs(r.out).name, "example2");
    Outcome f = run({"convert", model("example2.ctw"), "--to", "pict", "--out", (dir / "x.pict").string()});
    ASSERT_EQ(f.code, 0);
    EXPECT_EQ(formats::readPict(slurp(dir / "x.pict")).paramNames.size(), 3u);
}
