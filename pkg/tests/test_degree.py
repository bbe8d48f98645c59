import jsonschema
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fbannulus import degree as dg


def test_contribution_examples():
    assert dg.family_contribution(0, "S2") == 2
    assert dg.family_contribution(1, "S2") == -2
    assert dg.family_contribution(4, "RP2_pair") == 2
    assert dg.family_contribution(3, "RP2") == -1


@given(st.integers(0, 50), st.sampled_from(sorted(dg.EULER)))
def test_contribution_parity(i, manifold):
    c = dg.family_contribution(i, manifold)
    assert abs(c) == dg.EULER[manifold]
    assert c == dg.family_contribution(i + 2, manifold)
    assert c == -dg.family_contribution(i + 1, manifold)
    rec = dg.FamilyRecord(manifold, i)
    assert rec.euler == dg.EULER[manifold] and rec.contribution == c


def test_bad_inputs():
    with pytest.raises(ValueError):
        dg.family_contribution(0, "T2")
    with pytest.raises(ValueError):
        dg.family_contribution(-1, "S2")
    with pytest.raises(ValueError):
        dg.FamilyRecord("klein", 0)
    with pytest.raises(ValueError):
        dg.assemble_degree("genus2", {})


@given(st.integers(0, 20), st.integers(0, 20))
def test_degree_magnitudes(i_disk, i_cat):
    assert abs(dg.assemble_degree("disk", {"disk": i_disk}).total) == 2
    assert abs(dg.assemble_degree("annulus", {"catenoid": i_cat}).total) == 2
    assert dg.assemble_degree("other").total == 0


def test_computed_indices_give_signs(schema):
    disk = dg.assemble_degree("disk", {"disk": 1})
    ann = dg.assemble_degree("annulus", {"catenoid": 4})
    assert disk.total == -2 and ann.total == 2
    assert [r.manifold for r in ann.records] == ["RP2_pair"]
    for led in (disk, ann, dg.assemble_degree("other")):
        jsonschema.validate(led.to_dict(), schema("degree"))


def test_missing_report():
    with pytest.raises(dg.MissingReportError):
        dg.assemble_degree("annulus", {"disk": 1})
    with pytest.raises(KeyError):
        dg.assemble_degree("disk")


def test_fibonacci_sphere_is_unit():
    X = dg.fibonacci_sphere(100)
    assert np.allclose(np.linalg.norm(X, axis=1), 1)


def test_height_field_critical_points():
    pts = dg.critical_points(dg.height_field())
    assert len(pts) == 2
    assert sorted(p.index for p in pts) == [0, 2]
    assert dg.euler_from_critical_points(pts, "S2") == 2


def test_rp2_fields_are_even():
    f = dg.random_field("RP2", np.random.default_rng(3))
    X = dg.fibonacci_sphere(50)
    assert np.allclose(f.value(X), f.value(-X))


def test_morse_trial_is_seeded():
    a = dg.morse_trial("S2", 4, seed=1)
    b = dg.morse_trial("S2", 4, seed=1)
    assert a == b and not a.discarded


def test_morse_oracle():
    assert dg.morse_euler_oracle("S2", 20) == 2
    assert dg.morse_euler_oracle("RP2", 20) == 1
    with pytest.raises(ValueError):
        dg.morse_euler_oracle("RP2_pair")
