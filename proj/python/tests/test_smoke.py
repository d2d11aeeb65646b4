from fractions import Fraction
from pathlib import Path

import pytest

import ipmgen

MODELS = Path(__file__).resolve().parents[2] / "models"


@pytest.fixture
def example2():
    return ipmgen.load_ctwedge(MODELS / "example2.ctw")


def test_parse_and_print_round_trip(example2):
    assert example2.name == "example2"
    assert len(example2) == 3
    assert example2.constraints == ["a => b"]
    assert ipmgen.parse_ctwedge(str(example2)) == example2


def test_parameters_expose_domains():
    m = ipmgen.load_ctwedge(MODELS / "example1.ctw")
    kinds = [p.kind for p in m.parameters]
    assert kinds.count(ipmgen.ParamKind.INTEGER_RANGE) == 1
    p4 = m.parameters[3]
    assert p4.values == [2, 3, 4, 5]
    assert m.complexities == [0, 2, 2]


def test_exact_ratios(example2):
    assert ipmgen.total_tests(example2) == 12
    assert ipmgen.count_valid(example2) == 9
    assert ipmgen.test_validity_ratio(example2) == (Fraction(3, 4), "exact-mdd")
    assert ipmgen.tuple_validity_ratio(example2, 2) == Fraction(15, 16)


def test_solver(example2):
    witness = ipmgen.solve(example2, {"a": True})
    assert witness["a"] is True and witness["b"] is True
    assert ipmgen.satisfies(example2, witness)
    assert not ipmgen.is_tuple_valid(example2, {"a": True, "b": False})
    with pytest.raises(ValueError):
        ipmgen.solve(example2, {"c": "V9"})


def test_zero_one_sample_size():
    params = ipmgen.McParams(0.1, 0.75, 0.1)
    assert ipmgen.sample_size(params) == 8318
    assert ipmgen.sample_bound(params) == pytest.approx(8317.77, abs=0.01)


def test_monte_carlo(example2):
    r = ipmgen.test_validity_ratio_mc(example2, ipmgen.McParams(0.75, 0.75, 0.1), seed=3)
    assert r.estimate == pytest.approx(0.75, abs=0.075)
    assert r.valid_count <= r.sample_count


def test_analyze(example2):
    report = ipmgen.analyze(example2)
    assert report["category"] == "MC"
    assert report["testRatio"]["numerator"] == "3"
    assert report["tupleRatio"]["denominator"] == "16"


def test_generate_is_deterministic():
    config = ipmgen.GeneratorConfig()
    config.category = ipmgen.Category.NC
    config.n_benchmarks = 3
    config.k_min, config.k_max = 3, 5
    config.form = ipmgen.ConstraintForm.CNF
    config.seed = 11
    first = ipmgen.generate(config)
    second = ipmgen.generate(config)
    assert first.complete
    assert [str(g.model) for g in first.models] == [str(g.model) for g in second.models]
    for g in first.models:
        assert 3 <= len(g.model) <= 5
        assert ipmgen.is_solvable(g.model)
        assert ipmgen.infer_category(g.model) == ipmgen.Category.NC


def test_exports(example2):
    acts = ipmgen.export(example2, "acts")
    assert "[Constraint]" in acts
    assert ipmgen.export(example2, "pict").count(";") == 1
    with pytest.raises(ValueError):
        ipmgen.export(example2, "xml")


def test_errors_map_to_python_exceptions():
    with pytest.raises(ipmgen.ModelSyntaxError):
        ipmgen.parse_ctwedge("Model m Parameters: a : Boolean Constraints: # a AND #")
    with pytest.raises(ipmgen.ModelError):
        ipmgen.parse_ctwedge("Model m Parameters: a : Boolean Constraints: # b #")
    config = ipmgen.GeneratorConfig()
    config.k_min, config.k_max = 5, 2
    with pytest.raises(ipmgen.ConfigError):
        config.validate()
    assert issubclass(ipmgen.ConfigError, ipmgen.IpmError)
