import numpy as np
import pytest

from fiberinfo.rng import stream, streams


def test_streams_are_reproducible_and_independent_of_batching():
    a = np.concatenate([g.standard_normal(5) for g in streams(7, 0, 4)])
    b = np.concatenate([g.standard_normal(5) for g in streams(7, 0, 2) + streams(7, 2, 2)])
    np.testing.assert_array_equal(a, b)


def test_distinct_keys_give_distinct_draws():
    assert stream(1, 0).random() != stream(1, 1).random()
    assert stream(1, 0).random() != stream(2, 0).random()


def test_negative_keys_rejected():
    with pytest.raises(ValueError):
        stream(-1, 0)
