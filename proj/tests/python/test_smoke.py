import json
import math

import pytest

import armub


def test_hadamard_rows_are_orthogonal():
    h = armub.hadamard(12)
    rows = h["rows"]
    assert h["order"] == 12
    for i, a in enumerate(rows):
        for j, b in enumerate(rows):
            assert sum(x * y for x, y in zip(a, b)) == (12 if i == j else 0)


def test_hadamard_errors():
    with pytest.raises(ValueError):
        armub.hadamard(6)
    with pytest.raises(armub.NotConstructibleError):
        armub.hadamard(92)


def test_epsh_order_four():
    e = armub.epsh(4, 1)
    assert e["k"] == 3
    assert math.isclose(e["epsilon"]["float"], 1 - 1 / math.sqrt(3), rel_tol=1e-12)


def test_rbd_classes_partition_points():
    r = armub.rbd(3, 5)
    assert r["d"] == 15 and r["mu"] == 1
    for cls in r["classes"]:
        assert sorted(x for block in cls for x in block) == list(range(15))


def test_pipeline_and_verify(tmp_path):
    cert = armub.armub(3, 5, 1, out=tmp_path)
    assert cert["report"]["classification"] == "beta-ARMUB"
    assert cert["report"]["beta_within_bound"]
    v = armub.verify(tmp_path)
    assert v["ok"], v["failures"]
    assert v["report"]["d"] == 15

    epsh = json.loads((tmp_path / "epsh.json").read_text())
    epsh["entries"][0][0]["a"] = ["3", "7"]
    (tmp_path / "epsh.json").write_text(json.dumps(epsh, indent=2) + "\n")
    v = armub.verify(tmp_path)
    assert not v["ok"]
    assert "entry (0,0)" in v["failures"][0]


def test_fallback_is_apmub():
    cert = armub.armub(2, 3, 2)
    assert cert["report"]["classification"] == "APMUB"
    assert cert["notes"]


def test_split_dimension():
    assert armub.split_dimension(6399, 1) == (79, 81)
    with pytest.raises(ValueError):
        armub.armub(7, 5, 1)
