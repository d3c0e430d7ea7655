import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmtlab.streams import RandomStream, complex_normals, normals


def test_same_seed_same_bytes():
    a = normals(RandomStream(123, 7).generator(), 1000)
    b = normals(RandomStream(123, 7).generator(), 1000)
    assert np.array_equal(a, b)
    za = complex_normals(RandomStream(123, 7).generator(), 1000)
    zb = complex_normals(RandomStream(123, 7).generator(), 1000)
    assert np.array_equal(za, zb)


def test_different_streams_differ():
    a = normals(RandomStream(123, 0).generator(), 100)
    b = normals(RandomStream(123, 1).generator(), 100)
    c = normals(RandomStream(124, 0).generator(), 100)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_substream_independence():
    n = 1000
    x = np.array([normals(RandomStream(5, t).generator(), 1)[0] for t in range(n)])
    y = np.array([normals(RandomStream(5, t + n).generator(), 1)[0] for t in range(n)])
    corr = np.corrcoef(x, y)[0, 1]
    assert abs(corr) < 5.0 / np.sqrt(n)


def test_real_moments():
    x = normals(RandomStream(11).generator(), 200_000)
    assert abs(x.mean()) < 5 / np.sqrt(len(x))
    assert abs(x.var() - 1.0) < 5 * np.sqrt(2.0 / len(x))


def test_complex_moments():
    z = complex_normals(RandomStream(12).generator(), 200_000)
    assert abs(np.mean(np.abs(z) ** 2) - 1.0) < 5 / np.sqrt(len(z))
    assert abs(z.real.var() - 0.5) < 5 * np.sqrt(2.0 * 0.25 / len(z))
    # phase symmetric
    assert abs(np.mean(z)) < 5 * np.sqrt(1.0 / len(z))


@given(st.integers(0, 2**64 - 1), st.integers(0, 2**64 - 1), st.integers(0, 33))
@settings(max_examples=25, deadline=None)
def test_shapes_and_determinism(seed, index, n):
    s = RandomStream(seed, index)
    a = normals(s.generator(), n)
    assert a.shape == (n,)
    assert np.array_equal(a, normals(s.generator(), n))
    z = complex_normals(s.generator(), n)
    assert z.shape == (n,)


def test_substream_offset():
    s = RandomStream(9, 3)
    assert s.substream(4) == RandomStream(9, 7)


def test_seed_bounds():
    with pytest.raises(ValueError):
        RandomStream(-1)
    with pytest.raises(ValueError):
        RandomStream(0, 2**64)
