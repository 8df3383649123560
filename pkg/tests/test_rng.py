import numpy as np
import pytest

from permrank.field import FieldElement, field_new
from permrank.rng import RNG_ID, make_rng, sample_uniform, substream


def test_uniform_frequencies_gf3():
    F = field_new(3)
    draws = sample_uniform(F, make_rng(12345), size=30_000)
    counts = np.bincount(draws, minlength=3)
    assert all(9500 <= c <= 10500 for c in counts)


def test_identical_seeds_identical_streams():
    F = field_new(5)
    a = sample_uniform(F, make_rng(7), size=1000)
    b = sample_uniform(F, make_rng(7), size=1000)
    assert np.array_equal(a, b)
    assert sample_uniform(F, substream(7, 3)) == sample_uniform(F, substream(7, 3))


def test_substreams_differ():
    F = field_new(3)
    a = sample_uniform(F, substream(99, 0), size=1000)
    b = sample_uniform(F, substream(99, 1), size=1000)
    assert (a != b).any()
    c = sample_uniform(F, substream(100, 0), size=1000)
    assert (a != c).any()


def test_scalar_sample_is_element():
    F = field_new(3, 2)
    e = sample_uniform(F, make_rng(0))
    assert isinstance(e, FieldElement) and 0 <= int(e) < 9


def test_seed_range():
    with pytest.raises(ValueError):
        make_rng(-1)
    with pytest.raises(ValueError):
        make_rng(1 << 64)
    make_rng((1 << 64) - 1)
    assert "philox" in RNG_ID
