#include "cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "ipmgen/analyzer.hpp"
#include "ipmgen/ctwedge.hpp"
#include "ipmgen/errors.hpp"
#include "ipmgen/exporters.hpp"
#include "ipmgen/generator.hpp"

namespace ipmgen::cli {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Ipm loadModel(const std::string& path) {
    const std::string text = readFile(path);
    try {
        return parseCtwedge(text);
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

std::string decimal(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

// ---------------------------------------------------------------------------
// generate

// Every setting of `generate`, unset unless given. The same record is filled
// from the --config file and from the command line; flags win.
struct GenerateArgs {
    std::optional<std::string> type, name, form, ratioMode, formats, dictionary, baseline, out;
    std::optional<std::size_t> n, kMin, kMax, vMin, vMax, cMin, cMax, dMin, dMax, strength, maxRounds;
    std::optional<std::int64_t> intLower, intUpper;
    std::optional<double> tupleRatio, testRatio, prob, eps;
    std::optional<std::uint64_t> seed, fixedN;
    std::optional<unsigned> jobs;
    std::optional<bool> betweenParams;
};

template <class F>
void forEachField(F f) {
    using A = GenerateArgs;
    f("type", &A::type, "Category: UB, UA, M, BC, MC, NC or the long names");
    f("name", &A::name, "Model name prefix (default: the category's long name)");
    f("n", &A::n, "Number of benchmarks");
    f("k-min", &A::kMin, "Minimum parameter count");
    f("k-max", &A::kMax, "Maximum parameter count");
    f("v-min", &A::vMin, "Minimum cardinality (UA, M, MC, NC)");
    f("v-max", &A::vMax, "Maximum cardinality (UA, M, MC, NC)");
    f("int-lower", &A::intLower, "Lowest integer bound of ranges (NC)");
    f("int-upper", &A::intUpper, "Highest integer bound of ranges (NC)");
    f("c-min", &A::cMin, "Minimum constraint count (BC, MC, NC)");
    f("c-max", &A::cMax, "Maximum constraint count (BC, MC, NC)");
    f("d-min", &A::dMin, "Minimum constraint complexity (BC, MC, NC)");
    f("d-max", &A::dMax, "Maximum constraint complexity (BC, MC, NC)");
    f("between-params", &A::betweenParams, "Allow comparisons between parameters");
    f("form", &A::form, "Constraint form: general, cnf or forbidden");
    f("tuple-ratio", &A::tupleRatio, "Require a tuple validity ratio at most R");
    f("strength", &A::strength, "Tuple strength for --tuple-ratio");
    f("test-ratio", &A::testRatio, "Require a test validity ratio at most R (or near R with --ratio-mode band)");
    f("prob", &A::prob, "Monte Carlo confidence p");
    f("eps", &A::eps, "Monte Carlo relative error");
    f("fixed-n", &A::fixedN, "Use exactly N Monte Carlo samples");
    f("ratio-mode", &A::ratioMode, "max or band");
    f("formats", &A::formats, "Comma-separated export formats: ctwedge, acts, pict");
    f("dictionary", &A::dictionary, "Dictionary JSON file for parameter names and values");
    f("baseline", &A::baseline, "CTWedge model whose profile seeds the defaults");
    f("seed", &A::seed, "Random seed");
    f("out", &A::out, "Output directory");
    f("jobs", &A::jobs, "Benchmarks generated in parallel");
    f("max-rounds", &A::maxRounds, "Rounds of 10 attempts per benchmark before giving up");
}

template <class T>
void assignFromJson(const json& value, std::optional<T>& field, const std::string& key) {
    try {
        if constexpr (std::is_same_v<T, std::string>) {
            if (key == "formats" && value.is_array()) {
                std::string joined;
                for (const auto& item : value) joined += (joined.empty() ? "" : ",") + item.get<std::string>();
                field = joined;
                return;
            }
        }
        field = value.get<T>();
    } catch (const json::exception&) {
        throw UsageError("config key '" + key + "' has the wrong type");
    }
}

GenerateArgs argsFromConfigFile(const std::string& path) {
    json j;
    try {
        j = json::parse(readFile(path));
    } catch (const json::parse_error& e) {
        throw UsageError(path + ": " + e.what());
    }
    if (!j.is_object()) throw UsageError(path + ": expected a JSON object");
    GenerateArgs a;
    std::set<std::string> known;
    forEachField([&](const char* key, auto member, const char*) {
        known.insert(key);
        if (auto it = j.find(key); it != j.end()) assignFromJson(*it, a.*member, key);
    });
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw UsageError(path + ": unknown config key '" + key + "'");
    return a;
}

GenerateArgs merged(GenerateArgs base, const GenerateArgs& flags) {
    forEachField([&](const char*, auto member, const char*) {
        if (flags.*member) base.*member = flags.*member;
    });
    return base;
}

void requireCategory(bool ok, const std::string& flag, const std::string& why) {
    if (!ok) throw UsageError("--" + flag + " " + why);
}

void checkConflicts(const GenerateArgs& a, Category category) {
    const std::string cat(longName(category));
    const bool hasCards = category != Category::UB && category != Category::BC;
    for (auto [given, flag] : {std::pair{a.vMin.has_value(), "v-min"}, {a.vMax.has_value(), "v-max"}})
        if (given) requireCategory(hasCards, flag, "does not apply to " + cat + ": its parameters are all Boolean");
    for (auto [given, flag] : {std::pair{a.intLower.has_value(), "int-lower"}, {a.intUpper.has_value(), "int-upper"}})
        if (given) requireCategory(category == Category::NC, flag, "applies only to --type NC (NUMC), not " + cat);
    const std::pair<bool, const char*> constrainedOnly[] = {
        {a.cMin.has_value(), "c-min"},       {a.cMax.has_value(), "c-max"},
        {a.dMin.has_value(), "d-min"},       {a.dMax.has_value(), "d-max"},
        {a.betweenParams.value_or(false), "between-params"}, {a.form.has_value(), "form"},
        {a.tupleRatio.has_value(), "tuple-ratio"}, {a.testRatio.has_value(), "test-ratio"},
        {a.ratioMode.has_value(), "ratio-mode"}};
    for (auto [given, flag] : constrainedOnly)
        if (given)
            requireCategory(isConstrained(category), flag,
                            "applies only to constrained categories (BC, MC, NC), not " + cat);
    if (a.strength && !a.tupleRatio) throw UsageError("--strength requires --tuple-ratio");
    for (auto [given, flag] : {std::pair{a.prob.has_value(), "prob"}, {a.eps.has_value(), "eps"},
                               {a.fixedN.has_value(), "fixed-n"}})
        if (given && !a.testRatio) throw UsageError(std::string("--") + flag + " requires --test-ratio");
}

template <class T>
std::optional<T> parseOrUsage(std::optional<T> (*parse)(std::string_view), const std::string& text,
                              const std::string& flag) {
    if (auto v = parse(text)) return v;
    throw UsageError("invalid value '" + text + "' for --" + flag);
}

std::vector<ExportFormat> parseFormats(const std::string& text) {
    std::vector<ExportFormat> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        if (item.empty()) continue;
        ExportFormat f = *parseOrUsage<ExportFormat>(parseExportFormat, item, "formats");
        if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
    }
    if (out.empty()) throw UsageError("--formats needs at least one format");
    return out;
}

GeneratorConfig buildConfig(const GenerateArgs& a, std::ostream& err) {
    GeneratorConfig c;
    std::optional<Category> category;
    if (a.type) category = parseOrUsage<Category>(parseCategory, *a.type, "type");
    if (a.baseline) {
        const Ipm base = loadModel(*a.baseline);
        AnalysisOptions opts;
        const AnalysisReport report = analyze(base, opts);
        c = configFromReport(report);
        err << "baseline " << *a.baseline << ": " << longName(report.structure.category) << ", "
            << report.structure.parameterCount << " parameters, " << report.structure.constraintCount
            << " constraints\n";
        if (category && *category != c.category)
            throw UsageError("--type " + *a.type + " contradicts the baseline category " +
                             std::string(longName(c.category)));
    }
    if (!category && !a.baseline) throw UsageError("generate needs --type or --baseline");
    if (category) c.category = *category;
    checkConflicts(a, c.category);

    if (a.name) c.modelName = *a.name;
    if (a.n) c.nBenchmarks = *a.n;
    if (a.kMin) c.kMin = *a.kMin;
    if (a.kMax) c.kMax = *a.kMax;
    if (a.vMin) c.vMin = *a.vMin;
    if (a.vMax) c.vMax = *a.vMax;
    if (a.intLower) c.lInt = *a.intLower;
    if (a.intUpper) c.uInt = *a.intUpper;
    if (a.cMin) c.cMin = *a.cMin;
    if (a.cMax) c.cMax = *a.cMax;
    if (a.dMin) c.dMin = *a.dMin;
    if (a.dMax) c.dMax = *a.dMax;
    if (a.betweenParams) c.useCBtwP = *a.betweenParams;
    if (a.form) c.form = *parseOrUsage<ConstraintForm>(parseConstraintForm, *a.form, "form");
    if (a.tupleRatio) {
        c.useTupleRatio = true;
        c.tupleRatio = *a.tupleRatio;
    }
    if (a.strength) c.strength = *a.strength;
    if (a.testRatio) {
        c.useTestRatio = true;
        c.mc.targetRatio = *a.testRatio;
    }
    if (a.prob) c.mc.probability = *a.prob;
    if (a.eps) c.mc.maxError = *a.eps;
    if (a.fixedN) c.fixedSampleCount = *a.fixedN;
    if (a.ratioMode) c.ratioMode = *parseOrUsage<RatioMode>(parseRatioMode, *a.ratioMode, "ratio-mode");
    if (a.formats) c.formats = parseFormats(*a.formats);
    if (a.dictionary) {
        try {
            c.dictionary = loadDictionary(readFile(*a.dictionary));
        } catch (const ConfigError& e) {
            throw UsageError(*a.dictionary + ": " + e.what());
        }
    }
    if (a.seed) c.seed = *a.seed;
    if (a.jobs) c.jobs = *a.jobs;
    if (a.maxRounds) c.maxRounds = *a.maxRounds;
    try {
        c.validate();
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    return c;
}

ordered_json reportJson(const GeneratedModel& m, const std::vector<std::filesystem::path>& files) {
    ordered_json j;
    const ModelReport& r = m.report;
    j["model"] = m.model.name();
    j["index"] = r.index;
    j["attempts"] = r.attempts;
    j["clampedConstraints"] = r.clampedConstraints;
    if (r.tupleRatio) {
        j["tupleRatio"] = {{"value", static_cast<double>(*r.tupleRatio)},
                           {"exact", r.tupleRatio->str()}};
    } else if (r.tupleRatioAtMost) {
        j["tupleRatio"] = {{"atMost", static_cast<double>(*r.tupleRatioAtMost)},
                           {"bound", r.tupleRatioAtMost->str()}};
    } else {
        j["tupleRatio"] = nullptr;
    }
    if (r.testRatio) {
        ordered_json t{{"value", *r.testRatio}, {"method", std::string(toString(*r.testMethod))}};
        if (r.mc) {
            t["samples"] = r.mc->sampleCount;
            t["validSamples"] = r.mc->validCount;
            t["withinBand"] = r.mc->accepted;
        }
        j["testRatio"] = t;
    } else {
        j["testRatio"] = nullptr;
    }
    j["seconds"] = r.seconds;
    j["files"] = ordered_json::array();
    for (const auto& f : files) j["files"].push_back(f.string());
    return j;
}

int runGenerate(const GenerateArgs& flags, const std::optional<std::string>& configPath, bool asJson,
                std::ostream& out, std::ostream& err) {
    GenerateArgs a = configPath ? merged(argsFromConfigFile(*configPath), flags) : flags;
    const GeneratorConfig config = buildConfig(a, err);
    const std::filesystem::path dir = a.out.value_or(".");
    const GenerationResult result = generateBenchmarks(config);
    ordered_json reports = ordered_json::array();
    for (const auto& m : result.models) {
        const auto files = writeModelFiles(m.model, config.formats, dir);
        const ModelReport& r = m.report;
        err << m.model.name() << ": " << m.model.size() << " parameters, " << m.model.constraints().size()
            << " constraints, " << r.attempts << (r.attempts == 1 ? " attempt" : " attempts");
        if (r.testRatio)
            err << ", test ratio " << decimal(*r.testRatio) << " (" << toString(*r.testMethod) << ")";
        if (r.tupleRatio) err << ", tuple ratio " << decimal(static_cast<double>(*r.tupleRatio));
        if (r.tupleRatioAtMost) err << ", tuple ratio <= " << decimal(static_cast<double>(*r.tupleRatioAtMost));
        if (r.clampedConstraints) err << ", " << r.clampedConstraints << " forbidden tuples clamped";
        err << "\n";
        reports.push_back(reportJson(m, files));
    }
    for (const auto& f : result.failures) err << "error: " << f.message << "\n";
    if (asJson) out << reports.dump(2) << "\n";
    return result.complete() ? kOk : kFailure;
}

// ---------------------------------------------------------------------------
// analyze, ratio, convert

struct RatioArgs {
    std::string model;
    std::string method = "auto";
    std::string which = "both";
    std::size_t strength = 2;
    std::optional<std::uint64_t> fixedN;
    std::uint64_t seed = 0;
    McParams mc;
    bool asJson = false;
};

int runRatio(const RatioArgs& a, std::ostream& out, std::ostream& err) {
    if (a.method != "auto" && a.method != "exact" && a.method != "mc")
        throw UsageError("--method must be auto, exact or mc");
    if (a.which != "both" && a.which != "tuple" && a.which != "test")
        throw UsageError("--which must be both, tuple or test");
    try {
        a.mc.validate();
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    const Ipm ipm = loadModel(a.model);
    ordered_json j;
    j["model"] = ipm.name();
    std::ostringstream text;
    if (a.which != "tuple") {
        std::optional<ExactRatio> exact;
        if (a.method != "mc") {
            try {
                exact = testValidityRatioExact(ipm);
            } catch (const MethodUnavailable& e) {
                if (a.method == "exact") {
                    err << "error: " << e.what() << "\n";
                    return kFailure;
                }
            }
        }
        if (exact) {
            j["testRatio"] = {{"method", std::string(toString(exact->method))},
                              {"value", static_cast<double>(exact->value)},
                              {"validTests", exact->valid.str()},
                              {"totalTests", exact->total.str()}};
            text << "r_ts = " << decimal(static_cast<double>(exact->value)) << " (" << exact->valid << "/"
                 << exact->total << ", " << toString(exact->method) << ")\n";
        } else {
            McOptions mo;
            mo.fixedSampleCount = a.fixedN;
            const McResult r = testValidityRatioMc(ipm, a.mc, a.seed, mo);
            j["testRatio"] = {{"method", "monte-carlo"},       {"value", r.estimate},
                              {"samples", r.sampleCount},      {"validSamples", r.validCount},
                              {"seed", r.seed},                {"target", a.mc.targetRatio},
                              {"probability", a.mc.probability}, {"maxError", a.mc.maxError},
                              {"withinBand", r.accepted}};
            text << "r_ts ~ " << decimal(r.estimate) << " (" << r.validCount << "/" << r.sampleCount
                 << " samples, monte-carlo, seed " << r.seed << ")\n";
        }
    }
    if (a.which != "test") {
        if (a.strength < 1 || a.strength > ipm.size())
            throw UsageError("--strength must lie in [1, " + std::to_string(ipm.size()) + "]");
        TupleRatioOptions opts;
        const Rational r = tupleValidityRatio(ipm, a.strength, opts);
        j["tupleRatio"] = {{"strength", a.strength},
                           {"value", static_cast<double>(r)},
                           {"numerator", boost::multiprecision::numerator(r).str()},
                           {"denominator", boost::multiprecision::denominator(r).str()}};
        text << "r_tp(t=" << a.strength << ") = " << decimal(static_cast<double>(r)) << " (" << r << ")\n";
    }
    out << (a.asJson ? j.dump(2) + "\n" : text.str());
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Generator and analyzer of combinatorial test models"};
    app.name("ipmgen");
    app.require_subcommand(1);

    // generate
    GenerateArgs gen;
    std::optional<std::string> configPath;
    bool genJson = false;
    bool between = false;
    auto* generate = app.add_subcommand("generate", "Generate random benchmark models");
    forEachField([&](const char* key, auto member, const char* help) {
        auto& field = gen.*member;
        using T = typename std::remove_reference_t<decltype(field)>::value_type;
        const std::string flag = std::string("--") + key;
        if constexpr (std::is_same_v<T, bool>) {
            generate->add_flag(flag, between, help);
        } else {
            generate->add_option(flag, field, help);
        }
    });
    generate->add_option("--config", configPath, "JSON file with the same keys as the flags")
        ->check(CLI::ExistingFile);
    generate->add_flag("--json", genJson, "Print the generation report as JSON");

    // analyze
    std::string analyzeModel;
    bool analyzeJson = false;
    bool noRatios = false;
    AnalysisOptions aopts;
    std::optional<std::uint64_t> analyzeFixedN;
    auto* analyzeCmd = app.add_subcommand("analyze", "Profile an existing CTWedge model");
    analyzeCmd->add_option("model,--model", analyzeModel, "CTWedge model file")->required()->check(CLI::ExistingFile);
    analyzeCmd->add_flag("--json", analyzeJson, "Print JSON instead of a table");
    analyzeCmd->add_option("--strength", aopts.strength, "Tuple strength")->capture_default_str();
    analyzeCmd->add_option("--test-ratio", aopts.mc.targetRatio, "Target ratio r for the sample size")
        ->capture_default_str();
    analyzeCmd->add_option("--prob", aopts.mc.probability, "Monte Carlo confidence p")->capture_default_str();
    analyzeCmd->add_option("--eps", aopts.mc.maxError, "Monte Carlo relative error")->capture_default_str();
    analyzeCmd->add_option("--fixed-n", analyzeFixedN, "Use exactly N Monte Carlo samples");
    analyzeCmd->add_option("--seed", aopts.seed, "Monte Carlo seed")->capture_default_str();
    analyzeCmd->add_flag("--no-ratios", noRatios, "Skip both ratio computations");

    // ratio
    RatioArgs ratio;
    auto* ratioCmd = app.add_subcommand("ratio", "Compute the tuple and test validity ratios of a model");
    ratioCmd->add_option("model,--model", ratio.model, "CTWedge model file")->required()->check(CLI::ExistingFile);
    ratioCmd->add_option("--method", ratio.method, "Test ratio method: auto, exact or mc")->capture_default_str();
    ratioCmd->add_option("--which", ratio.which, "both, tuple or test")->capture_default_str();
    ratioCmd->add_option("--strength", ratio.strength, "Tuple strength")->capture_default_str();
    ratioCmd->add_option("--fixed-n", ratio.fixedN, "Use exactly N Monte Carlo samples");
    ratioCmd->add_option("--seed", ratio.seed, "Monte Carlo seed")->capture_default_str();
    ratioCmd->add_option("--test-ratio", ratio.mc.targetRatio, "Target ratio r for the sample size")
        ->capture_default_str();
    ratioCmd->add_option("--prob", ratio.mc.probability, "Monte Carlo confidence p")->capture_default_str();
    ratioCmd->add_option("--eps", ratio.mc.maxError, "Monte Carlo relative error")->capture_default_str();
    ratioCmd->add_flag("--json", ratio.asJson, "Print JSON");

    // convert
    std::string convertModel;
    std::string convertTo;
    std::optional<std::string> convertOut;
    auto* convertCmd = app.add_subcommand("convert", "Convert a CTWedge model to ACTS or PICT");
    convertCmd->add_option("model,--model", convertModel, "CTWedge model file")->required()->check(CLI::ExistingFile);
    convertCmd->add_option("--to", convertTo, "acts, pict or ctwedge")->required();
    convertCmd->add_option("--out", convertOut, "Output file (default: standard output)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        if (*generate) {
            if (generate->count("--between-params")) gen.betweenParams = between;
            return runGenerate(gen, configPath, genJson, out, err);
        }
        if (*analyzeCmd) {
            aopts.fixedSampleCount = analyzeFixedN;
            aopts.computeRatios = !noRatios;
            try {
                aopts.mc.validate();
            } catch (const ConfigError& e) {
                throw UsageError(e.what());
            }
            const AnalysisReport report = analyze(loadModel(analyzeModel), aopts);
            out << (analyzeJson ? toJson(report) + "\n" : toTable(report));
            return kOk;
        }
        if (*ratioCmd) return runRatio(ratio, out, err);
        if (*convertCmd) {
            const ExportFormat f = *parseOrUsage<ExportFormat>(parseExportFormat, convertTo, "to");
            const std::string text = render(loadModel(convertModel), f);
            if (convertOut) {
                std::ofstream file(*convertOut, std::ios::binary);
                if (!(file << text)) throw Error("cannot write " + *convertOut);
            } else {
                out << text;
            }
            return kOk;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kUsage;
}

}  // namespace ipmgen::cli
