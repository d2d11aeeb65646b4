#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <string>

#include "ipmgen/analyzer.hpp"
#include "ipmgen/ctwedge.hpp"
#include "ipmgen/errors.hpp"
#include "ipmgen/exporters.hpp"
#include "ipmgen/generator.hpp"
#include "ipmgen/model.hpp"
#include "ipmgen/ratios.hpp"
#include "ipmgen/solver.hpp"

namespace py = pybind11;
using namespace ipmgen;

namespace {

py::object toPyInt(const BigInt& value) {
    return py::reinterpret_steal<py::object>(PyLong_FromString(value.str().c_str(), nullptr, 10));
}

py::object toFraction(const Rational& value) {
    static py::object fraction = py::module_::import("fractions").attr("Fraction");
    return fraction(toPyInt(boost::multiprecision::numerator(value)),
                    toPyInt(boost::multiprecision::denominator(value)));
}

std::size_t paramIndex(const Ipm& ipm, const std::string& name) {
    auto i = ipm.findParameter(name);
    if (!i) throw py::key_error("unknown parameter: " + name);
    return *i;
}

std::size_t valueIndex(const Parameter& p, const py::handle& value) {
    std::optional<std::size_t> index;
    switch (p.kind()) {
        case ParamKind::Boolean:
            if (py::isinstance<py::bool_>(value)) index = value.cast<bool>() ? 1 : 0;
            break;
        case ParamKind::Enumerative:
            if (py::isinstance<py::str>(value)) index = p.labelIndex(value.cast<std::string>());
            break;
        case ParamKind::IntegerRange:
            if (py::isinstance<py::int_>(value) && !py::isinstance<py::bool_>(value))
                index = p.integerIndex(value.cast<std::int64_t>());
            break;
    }
    if (!index)
        throw py::value_error("value " + py::repr(value).cast<std::string>() + " is not in the domain of " + p.name());
    return *index;
}

py::object pyValue(const Parameter& p, std::size_t index) {
    switch (p.kind()) {
        case ParamKind::Boolean: return py::bool_(index == 1);
        case ParamKind::Enumerative: return py::str(p.labels()[index]);
        case ParamKind::IntegerRange: return py::int_(p.lower() + static_cast<std::int64_t>(index));
    }
    return py::none();
}

// Named values <-> domain indices.
Assignment toAssignment(const Ipm& ipm, const py::dict& values) {
    if (values.size() != ipm.size()) throw py::value_error("an assignment must give every parameter a value");
    Assignment a(ipm.size());
    for (auto [k, v] : values) {
        const std::size_t i = paramIndex(ipm, k.cast<std::string>());
        a[i] = valueIndex(ipm.parameter(i), v);
    }
    return a;
}

Tuple toTuple(const Ipm& ipm, const py::dict& values) {
    Tuple t;
    for (auto [k, v] : values) {
        const std::size_t i = paramIndex(ipm, k.cast<std::string>());
        t.push_back({i, valueIndex(ipm.parameter(i), v)});
    }
    std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) { return a.param < b.param; });
    return t;
}

py::dict toDict(const Ipm& ipm, const Assignment& a) {
    py::dict d;
    for (std::size_t i = 0; i < a.size(); ++i) d[py::str(ipm.parameter(i).name())] = pyValue(ipm.parameter(i), a[i]);
    return d;
}

template <typename Enum>
Enum parseOrThrow(std::optional<Enum> parsed, const std::string& what, const std::string& text) {
    if (!parsed) throw py::value_error("unknown " + what + ": " + text);
    return *parsed;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Input parameter model generation and analysis";

    auto error = py::register_exception<Error>(m, "IpmError", PyExc_RuntimeError);
    py::register_exception<ModelError>(m, "ModelError", error);
    py::register_exception<ConfigError>(m, "ConfigError", error);
    py::register_exception<ResourceError>(m, "ResourceError", error);
    py::register_exception<MethodUnavailable>(m, "MethodUnavailable", error);
    py::register_exception<SyntaxError>(m, "ModelSyntaxError", error);

    py::enum_<ParamKind>(m, "ParamKind")
        .value("BOOLEAN", ParamKind::Boolean)
        .value("ENUMERATIVE", ParamKind::Enumerative)
        .value("INTEGER_RANGE", ParamKind::IntegerRange);

    py::enum_<Category>(m, "Category")
        .value("UB", Category::UB)
        .value("UA", Category::UA)
        .value("M", Category::M)
        .value("BC", Category::BC)
        .value("MC", Category::MC)
        .value("NC", Category::NC);

    py::enum_<ConstraintForm>(m, "ConstraintForm")
        .value("GENERAL", ConstraintForm::General)
        .value("CNF", ConstraintForm::Cnf)
        .value("FORBIDDEN_TUPLES", ConstraintForm::ForbiddenTuples);

    py::enum_<RatioMode>(m, "RatioMode").value("MAX", RatioMode::Max).value("BAND", RatioMode::Band);

    py::enum_<ExportFormat>(m, "ExportFormat")
        .value("CTWEDGE", ExportFormat::Ctwedge)
        .value("ACTS", ExportFormat::Acts)
        .value("PICT", ExportFormat::Pict);

    py::class_<Parameter>(m, "Parameter")
        .def_static("boolean", &Parameter::boolean, py::arg("name"))
        .def_static("enumerative", &Parameter::enumerative, py::arg("name"), py::arg("labels"))
        .def_static("range", &Parameter::range, py::arg("name"), py::arg("lower"), py::arg("upper"))
        .def_property_readonly("name", &Parameter::name)
        .def_property_readonly("kind", &Parameter::kind)
        .def_property_readonly("labels", &Parameter::labels)
        .def_property_readonly("lower", &Parameter::lower)
        .def_property_readonly("upper", &Parameter::upper)
        .def_property_readonly("cardinality", &Parameter::cardinality)
        .def_property_readonly("values",
                               [](const Parameter& p) {
                                   py::list out;
                                   for (std::size_t i = 0; i < p.cardinality(); ++i) out.append(pyValue(p, i));
                                   return out;
                               })
        .def("__eq__", [](const Parameter& a, const Parameter& b) { return a == b; })
        .def("__repr__", [](const Parameter& p) {
            return "<Parameter " + p.name() + " : " + std::string(toString(p.kind())) + ">";
        });

    py::class_<Ipm>(m, "Model")
        .def_property_readonly("name", &Ipm::name)
        .def_property_readonly("parameters", &Ipm::parameters)
        .def_property_readonly("constraints",
                               [](const Ipm& ipm) {
                                   std::vector<std::string> out;
                                   for (const Expr& e : ipm.constraints()) out.push_back(printExpr(ipm, e));
                                   return out;
                               })
        .def_property_readonly("complexities",
                               [](const Ipm& ipm) {
                                   std::vector<std::size_t> out;
                                   for (const Expr& e : ipm.constraints()) out.push_back(complexity(e));
                                   return out;
                               })
        .def("__len__", &Ipm::size)
        .def("__eq__", [](const Ipm& a, const Ipm& b) { return a == b; })
        .def("__str__", &printCtwedge)
        .def("__repr__", [](const Ipm& ipm) {
            return "<Model " + ipm.name() + ": " + std::to_string(ipm.size()) + " parameters, " +
                   std::to_string(ipm.constraints().size()) + " constraints>";
        });

    m.def("parse_ctwedge", &parseCtwedge, py::arg("text"));
    m.def("print_ctwedge", &printCtwedge, py::arg("model"));
    m.def(
        "export",
        [](const Ipm& ipm, const std::string& format) {
            return render(ipm, parseOrThrow(parseExportFormat(format), "export format", format));
        },
        py::arg("model"), py::arg("format"));

    m.def("total_tests", [](const Ipm& ipm) { return toPyInt(totalTests(ipm)); }, py::arg("model"));
    m.def(
        "count_tuples", [](const Ipm& ipm, std::size_t t) { return toPyInt(countTuples(ipm, t)); },
        py::arg("model"), py::arg("strength"));
    m.def(
        "satisfies",
        [](const Ipm& ipm, const py::dict& values) { return satisfiesAll(ipm, toAssignment(ipm, values)); },
        py::arg("model"), py::arg("assignment"));
    m.def(
        "solve",
        [](const Ipm& ipm, const py::dict& fixed, std::uint64_t nodeBudget) -> py::object {
            Solver solver(ipm, SolverOptions{nodeBudget});
            auto witness = solver.solve(toTuple(ipm, fixed));
            if (!witness) return py::none();
            return toDict(ipm, *witness);
        },
        py::arg("model"), py::arg("fixed") = py::dict(), py::arg("node_budget") = SolverOptions{}.nodeBudget);
    m.def(
        "is_solvable", [](const Ipm& ipm, std::uint64_t budget) { return isSolvable(ipm, SolverOptions{budget}); },
        py::arg("model"), py::arg("node_budget") = SolverOptions{}.nodeBudget);
    m.def(
        "is_tuple_valid",
        [](const Ipm& ipm, const py::dict& tuple) { return isTupleValid(ipm, toTuple(ipm, tuple)); },
        py::arg("model"), py::arg("tuple"));
    m.def(
        "count_valid", [](const Ipm& ipm) { return toPyInt(countSatisfying(ipm)); }, py::arg("model"));

    m.def(
        "tuple_validity_ratio",
        [](const Ipm& ipm, std::size_t t) { return toFraction(tupleValidityRatio(ipm, t)); }, py::arg("model"),
        py::arg("strength") = 2);
    m.def(
        "test_validity_ratio",
        [](const Ipm& ipm) {
            ExactRatio r = testValidityRatioExact(ipm);
            return py::make_tuple(toFraction(r.value), std::string(toString(r.method)));
        },
        py::arg("model"));

    py::class_<McParams>(m, "McParams")
        .def(py::init([](double r, double p, double e) { return McParams{r, p, e}; }), py::arg("target_ratio") = 0.1,
             py::arg("probability") = 0.75, py::arg("max_error") = 0.1)
        .def_readwrite("target_ratio", &McParams::targetRatio)
        .def_readwrite("probability", &McParams::probability)
        .def_readwrite("max_error", &McParams::maxError)
        .def("validate", &McParams::validate);

    py::class_<McResult>(m, "McResult")
        .def_readonly("sample_count", &McResult::sampleCount)
        .def_readonly("valid_count", &McResult::validCount)
        .def_readonly("estimate", &McResult::estimate)
        .def_readonly("accepted", &McResult::accepted)
        .def_readonly("seed", &McResult::seed);

    m.def("sample_bound", &sampleBound, py::arg("params"));
    m.def("sample_size", &sampleSize, py::arg("params"));
    m.def("within_band", &withinBand, py::arg("estimate"), py::arg("target"), py::arg("max_error"));
    m.def(
        "test_validity_ratio_mc",
        [](const Ipm& ipm, const McParams& params, std::uint64_t seed, std::optional<std::uint64_t> samples,
           unsigned jobs) {
            py::gil_scoped_release release;
            return testValidityRatioMc(ipm, params, seed, McOptions{samples, jobs});
        },
        py::arg("model"), py::arg("params") = McParams{}, py::arg("seed") = 0, py::arg("samples") = py::none(),
        py::arg("jobs") = 1);

    m.def("infer_category", &inferCategory, py::arg("model"));
    m.def(
        "analyze_json",
        [](const Ipm& ipm, std::size_t strength, std::uint64_t seed, bool ratios) {
            AnalysisOptions o;
            o.strength = strength;
            o.seed = seed;
            o.computeRatios = ratios;
            return toJson(analyze(ipm, o));
        },
        py::arg("model"), py::arg("strength") = 2, py::arg("seed") = 0, py::arg("ratios") = true);

    py::class_<GeneratorConfig>(m, "GeneratorConfig")
        .def(py::init<>())
        .def_readwrite("category", &GeneratorConfig::category)
        .def_readwrite("model_name", &GeneratorConfig::modelName)
        .def_readwrite("n_benchmarks", &GeneratorConfig::nBenchmarks)
        .def_readwrite("k_min", &GeneratorConfig::kMin)
        .def_readwrite("k_max", &GeneratorConfig::kMax)
        .def_readwrite("v_min", &GeneratorConfig::vMin)
        .def_readwrite("v_max", &GeneratorConfig::vMax)
        .def_readwrite("int_lower", &GeneratorConfig::lInt)
        .def_readwrite("int_upper", &GeneratorConfig::uInt)
        .def_readwrite("c_min", &GeneratorConfig::cMin)
        .def_readwrite("c_max", &GeneratorConfig::cMax)
        .def_readwrite("d_min", &GeneratorConfig::dMin)
        .def_readwrite("d_max", &GeneratorConfig::dMax)
        .def_readwrite("between_params", &GeneratorConfig::useCBtwP)
        .def_readwrite("form", &GeneratorConfig::form)
        .def_readwrite("use_tuple_ratio", &GeneratorConfig::useTupleRatio)
        .def_readwrite("tuple_ratio", &GeneratorConfig::tupleRatio)
        .def_readwrite("strength", &GeneratorConfig::strength)
        .def_readwrite("use_test_ratio", &GeneratorConfig::useTestRatio)
        .def_readwrite("mc", &GeneratorConfig::mc)
        .def_readwrite("ratio_mode", &GeneratorConfig::ratioMode)
        .def_readwrite("seed", &GeneratorConfig::seed)
        .def_readwrite("max_rounds", &GeneratorConfig::maxRounds)
        .def_readwrite("jobs", &GeneratorConfig::jobs)
        .def(
            "use_dictionary", [](GeneratorConfig& c, const std::string& json) { c.dictionary = loadDictionary(json); },
            py::arg("json_text"))
        .def("validate", &GeneratorConfig::validate);

    m.def("config_from_model", [](const Ipm& ipm) { return configFromReport(analyze(ipm)); }, py::arg("model"));

    py::class_<GeneratedModel>(m, "GeneratedModel")
        .def_readonly("model", &GeneratedModel::model)
        .def_property_readonly("index", [](const GeneratedModel& g) { return g.report.index; })
        .def_property_readonly("attempts", [](const GeneratedModel& g) { return g.report.attempts; })
        .def_property_readonly("test_ratio", [](const GeneratedModel& g) { return g.report.testRatio; })
        .def_property_readonly("tuple_ratio", [](const GeneratedModel& g) -> py::object {
            if (g.report.tupleRatio) return toFraction(*g.report.tupleRatio);
            return py::none();
        });

    py::class_<GenerationFailure>(m, "GenerationFailure")
        .def_readonly("index", &GenerationFailure::index)
        .def_readonly("attempts", &GenerationFailure::attempts)
        .def_readonly("message", &GenerationFailure::message);

    py::class_<GenerationResult>(m, "GenerationResult")
        .def_readonly("models", &GenerationResult::models)
        .def_readonly("failures", &GenerationResult::failures)
        .def_property_readonly("complete", &GenerationResult::complete);

    m.def(
        "generate",
        [](const GeneratorConfig& config) {
            py::gil_scoped_release release;
            return generateBenchmarks(config);
        },
        py::arg("config"));
}
