import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rzlab.grid import (
    Field,
    GridSpec,
    lp_norm,
    read_field,
    sample,
    weak_l1,
    write_field,
)


def test_sample_constant():
    g = GridSpec(1, 4, 1.0)
    f = sample(g, lambda x: 1.0)
    np.testing.assert_array_equal(f.values, [1.0, 1.0, 1.0, 1.0])


def test_sample_coordinate():
    g = GridSpec(1, 4, 1.0)
    f = sample(g, lambda x: x[0])
    np.testing.assert_allclose(f.values, [-1.0, -0.5, 0.0, 0.5])


def test_sample_radius_squared_2d():
    g = GridSpec(2, 4, 2.0)
    f = sample(g, lambda x: x @ x)
    assert f.values[0, 0] == 8.0


def test_sample_rejects_nonfinite():
    g = GridSpec(1, 4, 1.0)
    with pytest.raises(ValueError, match="not finite"):
        sample(g, lambda x: float("inf") if x[0] == 0 else 1.0)


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec(0, 4, 1.0)
    with pytest.raises(ValueError):
        GridSpec(1, 5, 1.0)
    with pytest.raises(ValueError):
        GridSpec(1, 2, 1.0)
    with pytest.raises(ValueError):
        GridSpec(1, 4, -1.0)


def test_lp_norm_345():
    # h = 1 so the sums are bare: (3^2 + 4^2)^(1/2) = 5
    g = GridSpec(1, 4, 2.0)
    f = Field(g, [3.0, 4.0, 0.0, 0.0])
    assert lp_norm(f, 2) == pytest.approx(5.0, rel=1e-14)
    assert lp_norm(f, 1) == pytest.approx(7.0, rel=1e-14)
    region = np.array([True, False, False, False])
    assert lp_norm(f, 2, region) == pytest.approx(3.0, rel=1e-14)


def test_lp_norm_with_predicate_region():
    g = GridSpec(1, 4, 2.0)
    f = Field(g, [3.0, 4.0, 1.0, 1.0])
    # predicate of the point coordinates selects the first cell (x = -2)
    assert lp_norm(f, 2, lambda x: x[0] < -1.5) == pytest.approx(3.0)


def test_lp_norm_empty_region_warns():
    g = GridSpec(1, 4, 2.0)
    f = Field(g, [1.0, 2.0, 3.0, 4.0])
    with pytest.warns(UserWarning, match="empty region"):
        assert lp_norm(f, 1, np.zeros(4, dtype=bool)) == 0.0


def test_weak_l1_examples():
    g = GridSpec(1, 4, 2.0)  # h = 1
    f = Field(g, [3.0, 1.0, 0.0, 0.0])
    assert weak_l1(f) == pytest.approx(3.0)
    assert weak_l1(Field(g, np.zeros(4))) == 0.0
    assert weak_l1(Field(g, [2.0, 2.0, 2.0, 2.0])) == pytest.approx(8.0)


@settings(max_examples=25, deadline=None)
@given(
    alpha=st.floats(-1e3, 1e3, allow_nan=False),
    p=st.floats(1.0, 4.0),
    seed=st.integers(0, 2**31),
)
def test_lp_norm_homogeneous(alpha, p, seed):
    g = GridSpec(2, 8, 1.5)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(g.shape)
    base = lp_norm(Field(g, v), p)
    scaled = lp_norm(Field(g, alpha * v), p)
    assert scaled == pytest.approx(abs(alpha) * base, rel=1e-12, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_weak_l1_below_l1(seed):
    g = GridSpec(1, 16, 2.0)
    rng = np.random.default_rng(seed)
    f = Field(g, rng.standard_normal(g.shape))
    assert weak_l1(f) <= lp_norm(f, 1) * (1 + 1e-15)


def test_rzf1_roundtrip_bit_exact(tmp_path):
    g = GridSpec(2, 8, 3.0)
    rng = np.random.default_rng(7)
    f = Field(g, rng.standard_normal(g.shape))
    path = tmp_path / "f.rzf"
    write_field(f, path)
    f2 = read_field(path)
    assert f2.spec == g
    assert f2.values.tobytes() == f.values.tobytes()
    write_field(f2, tmp_path / "f2.rzf")
    assert (tmp_path / "f.rzf").read_bytes() == (tmp_path / "f2.rzf").read_bytes()


def test_rzf1_rejects_bad_magic(tmp_path):
    path = tmp_path / "junk.rzf"
    path.write_bytes(b"NOPE" + b"\0" * 32)
    with pytest.raises(ValueError, match="not an RZF1"):
        read_field(path)


def test_rzf1_rejects_truncated(tmp_path):
    g = GridSpec(1, 4, 1.0)
    f = Field(g, [1.0, 2.0, 3.0, 4.0])
    path = tmp_path / "f.rzf"
    write_field(f, path)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ValueError, match="payload"):
        read_field(path)


def test_field_shape_validation():
    g = GridSpec(2, 4, 1.0)
    with pytest.raises(ValueError, match="samples"):
        Field(g, np.zeros(7))
    with pytest.raises(ValueError, match="non-finite"):
        Field(g, np.full(g.shape, np.nan))
