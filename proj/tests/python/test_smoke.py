import json
import os

import pytest

import ssrkit

DATA = os.environ.get("SSRKIT_DATA", os.path.join(os.path.dirname(__file__), "..", "..", "data"))


def load(name):
    with open(os.path.join(DATA, name)) as f:
        return json.load(f)


@pytest.fixture(scope="module")
def fixture4():
    return load("f_example.json")


def test_analyze_classification(fixture4):
    doc = ssrkit.analyze(fixture4, s=1)
    assert doc["sparse"]["index"] == 1
    assert doc["sparse"]["witness"] == [1, 4]
    assert doc["eig"]["index"] == -1
    assert doc["classification"]["J1"] == ["3"]
    assert doc["classification"]["J2"] == ["2"]
    assert doc["classification"]["J3"] == ["1"]


def test_decompose_zero_blocks(fixture4):
    doc = ssrkit.decompose(fixture4)
    labels = [b["label"] for b in doc["blocks"]]
    assert labels == ["1", "2", "3"]
    assert doc["sensors"][1]["per_block"][2]["O"]["zero"]
    assert doc["sensors"][2]["per_block"][2]["O"]["zero"]


def test_simulate_solve_roundtrip(fixture4):
    sim = ssrkit.simulate(fixture4, [1, 2, 0, 1], attack="random", s=1, magnitude=25, seed=5)
    assert len(sim["attacked"]) == 1
    sol = ssrkit.solve(sim["instance"], method="brute", s=1)
    assert sol["attack_set"] == sim["attacked"]
    assert sol["x"] == pytest.approx([1.0, 2.0, 0.0, 1.0], abs=1e-8)

    dec = ssrkit.solve(sim["instance"], method="decompose", s=1)
    assert dec["per_eigenvalue_status"]["3"] == "unreconstructable"
    assert dec["unique"] == "ambiguous"


def test_exceptions_map_to_python_types(fixture4):
    with pytest.raises(ssrkit.ValidationError):
        ssrkit.analyze({"A": [[1.0, 0.0]], "sensors": []})
    with pytest.raises(ssrkit.InfeasibleError):
        # two-sparse observable system admits no single-budget stealth attack
        ssrkit.simulate(load("example1.json"), [1, 1], attack="stealth", s=1)
    with pytest.raises(ssrkit.BudgetError):
        sim = ssrkit.simulate(fixture4, [1, 2, 0, 1], attack="random", s=1, seed=5)
        ssrkit.solve(sim["instance"], method="brute", s=1, budget=1)
    assert issubclass(ssrkit.ValidationError, ValueError)


def test_reductions():
    red = ssrkit.reduce_cs(load("cs_example.json"))
    m = len(red["mapping"]["F"])
    n = len(red["mapping"]["F"][0])
    assert len(red["A"]) == n - m
    assert len(red["measurements"]) == n

    deg = ssrkit.reduce_degeneracy(load("degeneracy_example.json"))
    assert deg["mapping"]["r"] == len(deg["sensors"]) - len(deg["A"])
