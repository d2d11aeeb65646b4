#include <gtest/gtest.h>

#include <random>

#include "ipmgen/ctwedge.hpp"
#include "ipmgen/errors.hpp"
#include "ipmgen/generator.hpp"
#include "ipmgen/solver.hpp"
#include "oracle.hpp"

using namespace ipmgen;

namespace {

GeneratorConfig baseConfig(Category c) {
    GeneratorConfig g;
    g.category = c;
    g.nBenchmarks = 3;
    g.kMin = 2;
    g.kMax = 6;
    g.vMin = 2;
    g.vMax = 5;
    g.lInt = -5;
    g.uInt = 5;
    g.cMin = 1;
    g.cMax = 3;
    g.dMin = 1;
    g.dMax = 3;
    g.seed = 9;
    return g;
}

void expectWithinConfig(const GeneratorConfig& g, const Ipm& m) {
    EXPECT_FALSE(structuralViolation(g, m)) << *structuralViolation(g, m);
    EXPECT_TRUE(oracle::solvable(m) || totalTests(m) > 100'000);
    EXPECT_EQ(parseCtwedge(printCtwedge(m)), m);
}

}  // namespace

TEST(Generator, NamesAndParsing) {
    EXPECT_EQ(parseConstraintForm("cnf"), ConstraintForm::Cnf);
    EXPECT_EQ(parseConstraintForm("forbidden"), ConstraintForm::ForbiddenTuples);
    EXPECT_FALSE(parseConstraintForm("dnf"));
    EXPECT_EQ(parseRatioMode("band"), RatioMode::Band);
    GeneratorConfig g;
    g.category = Category::MC;
    EXPECT_EQ(g.effectiveName(), "MCAC");
}

TEST(Generator, EveryCategoryMeetsItsConfig) {
    for (Category c : {Category::UB, Category::UA, Category::M, Category::BC, Category::MC, Category::NC}) {
        GeneratorConfig g = baseConfig(c);
        GenerationResult r = generateBenchmarks(g);
        ASSERT_TRUE(r.complete()) << abbreviation(c) << ": " << r.failures.front().message;
        ASSERT_EQ(r.models.size(), 3u);
        for (std::size_t i = 0; i < r.models.size(); ++i) {
            const auto& m = r.models[i];
            EXPECT_EQ(m.model.name(), g.effectiveName() + "_" + std::to_string(i));
            EXPECT_EQ(m.report.index, i);
            expectWithinConfig(g, m.model);
        }
    }
}

TEST(Generator, FormsAreRespected) {
    for (ConstraintForm f : {ConstraintForm::Cnf, ConstraintForm::ForbiddenTuples}) {
        for (Category c : {Category::BC, Category::MC, Category::NC}) {
            GeneratorConfig g = baseConfig(c);
            g.form = f;
            g.useCBtwP = true;
            GenerationResult r = generateBenchmarks(g);
            ASSERT_TRUE(r.complete()) << r.failures.front().message;
            for (const auto& m : r.models) {
                for (const auto& e : m.model.constraints()) {
                    EXPECT_TRUE(f == ConstraintForm::Cnf ? isCnf(e) : isForbiddenTuple(e));
                }
            }
        }
    }
}

TEST(Generator, ExactComplexityIsRealized) {
    Rng rng(3);
    std::vector<Parameter> params = defineParameters(Category::NC, 6, -10, 10, 2, 6, nullptr, rng);
    for (ConstraintForm f : {ConstraintForm::General, ConstraintForm::Cnf}) {
        for (std::size_t d = 0; d <= 8; ++d) {
            ConstraintDraw draw = defineConstraints(params, 5, d, d, true, f, Category::NC, rng);
            ASSERT_EQ(draw.constraints.size(), 5u);
            for (const auto& e : draw.constraints) EXPECT_EQ(complexity(e), d);
        }
    }
    ConstraintDraw ft = defineConstraints(params, 4, 9, 9, false, ConstraintForm::ForbiddenTuples, Category::NC, rng);
    EXPECT_EQ(ft.clamped, 4u);
    for (const auto& e : ft.constraints) EXPECT_EQ(complexity(e), 5u);
}

TEST(Generator, DeterministicAndJobIndependent) {
    GeneratorConfig g = baseConfig(Category::NC);
    g.nBenchmarks = 6;
    GenerationResult a = generateBenchmarks(g);
    g.jobs = 3;
    GenerationResult b = generateBenchmarks(g);
    ASSERT_EQ(a.models.size(), b.models.size());
    for (std::size_t i = 0; i < a.models.size(); ++i) EXPECT_EQ(a.models[i].model, b.models[i].model);
    g.seed = 10;
    GenerationResult c = generateBenchmarks(g);
    EXPECT_NE(printCtwedge(a.models[0].model), printCtwedge(c.models[0].model));
}

TEST(Generator, RatioThresholdsHold) {
    GeneratorConfig g = baseConfig(Category::MC);
    g.nBenchmarks = 4;
    g.useTupleRatio = true;
    g.tupleRatio = 0.9;
    g.useTestRatio = true;
    g.mc.targetRatio = 0.5;
    GenerationResult r = generateBenchmarks(g);
    ASSERT_TRUE(r.complete()) << r.failures.front().message;
    for (const auto& m : r.models) {
        EXPECT_LE(oracle::tupleRatio(m.model, 2), Rational(9, 10));
        EXPECT_LE(Rational(oracle::countValid(m.model), 1) / Rational(totalTests(m.model)), Rational(1, 2));
        ASSERT_TRUE(m.report.testRatio);
        EXPECT_LE(*m.report.testRatio, 0.5);
    }
}

TEST(Generator, BandModeAcceptsOnlyInsideBand) {
    GeneratorConfig g = baseConfig(Category::BC);
    g.nBenchmarks = 3;
    g.useTestRatio = true;
    g.mc.targetRatio = 0.5;
    g.mc.maxError = 0.2;
    g.ratioMode = RatioMode::Band;
    GenerationResult r = generateBenchmarks(g);
    ASSERT_TRUE(r.complete()) << r.failures.front().message;
    for (const auto& m : r.models) {
        const double ratio = static_cast<double>(oracle::countValid(m.model)) /
                             static_cast<double>(totalTests(m.model));
        EXPECT_GE(ratio, 0.4 - 1e-12);
        EXPECT_LE(ratio, 0.6 + 1e-12);
    }
}

TEST(Generator, DictionaryNamesAreUsed) {
    Dictionary dict = {
        {"Wifi", DictionaryEntry::Type::Boolean, {}, 0, 0},
        {"Color", DictionaryEntry::Type::Enum, {"red", "green", "blue"}, 0, 0},
        {"Size", DictionaryEntry::Type::Integer, {}, 1, 4},
    };
    Rng rng(5);
    auto params = defineParameters(Category::NC, 3, -10, 10, 2, 4, &dict, rng);
    int named = 0;
    for (const auto& p : params) named += p.name() == "Wifi" || p.name() == "Color" || p.name() == "Size";
    EXPECT_GE(named, 1);
    std::set<std::string> names;
    for (const auto& p : params) EXPECT_TRUE(names.insert(p.name()).second);
}

TEST(Generator, RejectsInvalidConfigs) {
    auto bad = [](auto mutate) {
        GeneratorConfig g = baseConfig(Category::NC);
        mutate(g);
        EXPECT_THROW(g.validate(), ConfigError);
    };
    bad([](GeneratorConfig& g) { g.kMin = 0; });
    bad([](GeneratorConfig& g) { g.kMin = 7; });
    bad([](GeneratorConfig& g) { g.vMin = 6; });
    bad([](GeneratorConfig& g) { g.lInt = 6; });
    bad([](GeneratorConfig& g) { g.vMin = 20; g.vMax = 30; });
    bad([](GeneratorConfig& g) { g.cMin = 4; });
    bad([](GeneratorConfig& g) { g.cMax = 0; g.cMin = 0; });
    bad([](GeneratorConfig& g) { g.dMin = 4; });
    bad([](GeneratorConfig& g) { g.form = ConstraintForm::ForbiddenTuples; g.dMin = 6; g.dMax = 6; });
    bad([](GeneratorConfig& g) { g.modelName = "not valid"; });
    bad([](GeneratorConfig& g) { g.useTupleRatio = true; g.tupleRatio = 0; });
    bad([](GeneratorConfig& g) { g.useTupleRatio = true; g.strength = 7; });
    bad([](GeneratorConfig& g) { g.useTupleRatio = true; g.tupleRatio = 0.01; });
    bad([](GeneratorConfig& g) { g.useTestRatio = true; g.mc.probability = 1.0; });
    bad([](GeneratorConfig& g) { g.category = Category::UB; g.useTestRatio = true; });
    bad([](GeneratorConfig& g) { g.category = Category::M; g.vMin = 3; g.vMax = 3; });
    bad([](GeneratorConfig& g) { g.category = Category::BC; g.useTupleRatio = true; g.tupleRatio = 0.1; });
    bad([](GeneratorConfig& g) { g.maxRounds = 0; });
    EXPECT_NO_THROW(baseConfig(Category::NC).validate());
}

TEST(Generator, ExhaustionIsReportedPerIndex) {
    GeneratorConfig g = baseConfig(Category::BC);
    g.nBenchmarks = 2;
    g.maxRounds = 1;
    g.attemptsPerRound = 3;
    g.useTestRatio = true;
    g.mc.targetRatio = 0.001;
    GenerationResult r = generateBenchmarks(g);
    EXPECT_FALSE(r.complete());
    ASSERT_EQ(r.failures.size(), 2u);
    EXPECT_EQ(r.failures[1].index, 1u);
    EXPECT_EQ(r.failures[0].attempts, 3u);
    EXPECT_NE(r.failures[0].message.find("in 3 attempts"), std::string::npos);
}

TEST(Generator, StructuralViolationMessages) {
    GeneratorConfig g = baseConfig(Category::BC);
    Ipm wrongCategory = parseCtwedge("Model m Parameters: a : Boolean n : [0 .. 1] Constraints: # a #");
    EXPECT_EQ(structuralViolation(g, wrongCategory)->rfind("category:", 0), 0u);
    Ipm tooSimple = parseCtwedge("Model m Parameters: a : Boolean b : Boolean Constraints: # a #");
    EXPECT_EQ(structuralViolation(g, tooSimple)->rfind("complexity:", 0), 0u);
    g.form = ConstraintForm::Cnf;
    Ipm notCnf = parseCtwedge("Model m Parameters: a : Boolean b : Boolean Constraints: # a => b #");
    EXPECT_EQ(*structuralViolation(g, notCnf), "form: constraint not in CNF");
}

TEST(Generator, AnalyzeOfGeneratedStaysWithinConfig) {
    std::mt19937_64 rng(77);
    const Category cats[] = {Category::UB, Category::UA, Category::M, Category::BC, Category::MC, Category::NC};
    for (int i = 0; i < 30; ++i) {
        GeneratorConfig g;
        g.category = cats[rng() % 6];
        g.nBenchmarks = 1;
        g.kMin = 2 + rng() % 4;
        g.kMax = g.kMin + rng() % 4;
        g.vMin = 2 + rng() % 3;
        g.vMax = g.vMin + 1 + rng() % 3;
        g.lInt = -static_cast<std::int64_t>(rng() % 10);
        g.uInt = static_cast<std::int64_t>(rng() % 10);
        g.cMin = 1 + rng() % 2;
        g.cMax = g.cMin + rng() % 3;
        g.dMin = rng() % 2;
        g.dMax = g.dMin + rng() % 3;
        g.seed = rng();
        GenerationResult r = generateBenchmarks(g);
        ASSERT_TRUE(r.complete()) << r.failures.front().message;
        const auto s = analyze(r.models[0].model).structure;
        EXPECT_EQ(s.category, g.category);
        EXPECT_GE(s.parameterCount, g.kMin);
        EXPECT_LE(s.parameterCount, g.kMax);
    }
}

TEST(Generator, ConfigFromReport) {
    Ipm m = parseCtwedge("Model base Parameters: a : Boolean c : {x, y, z} n : [1 .. 4] Constraints:"
                         " # a => c = x # # NOT (n > 2 AND a) OR c = y #");
    GeneratorConfig g = configFromReport(analyze(m));
    EXPECT_EQ(g.category, Category::NC);
    EXPECT_EQ(g.modelName, "base");
    EXPECT_EQ(g.kMin, 3u);
    EXPECT_EQ(g.kMax, 3u);
    EXPECT_EQ(g.vMin, 2u);
    EXPECT_EQ(g.vMax, 4u);
    EXPECT_EQ(g.lInt, 1);
    EXPECT_EQ(g.uInt, 4);
    EXPECT_EQ(g.cMin, 2u);
    EXPECT_EQ(g.dMin, 1u);
    EXPECT_EQ(g.dMax, 2u);
    EXPECT_EQ(g.form, ConstraintForm::General);
    EXPECT_FALSE(g.useTupleRatio);
    EXPECT_FALSE(g.useTestRatio);
    g.nBenchmarks = 2;
    GenerationResult r = generateBenchmarks(g);
    ASSERT_TRUE(r.complete()) << r.failures.front().message;
    for (const auto& gm : r.models) EXPECT_FALSE(structuralViolation(g, gm.model));
}
