import numpy as np
import pytest

from dephasim.sequences import (
    SequenceError,
    custom_sequence,
    free_sequence,
    periodic_sequence,
    uhrig_sequence,
)


def test_free_sequence():
    seq = free_sequence(2.0)
    assert seq.n_flips == 0
    np.testing.assert_array_equal(seq.boundaries(), [0.0, 2.0])


def test_periodic_layout():
    seq = periodic_sequence(0.5, 4)
    assert seq.total_time == 2.0
    np.testing.assert_allclose(seq.flips, [0.5, 1.0, 1.5])
    np.testing.assert_allclose(seq.durations(), [0.5] * 4)


def test_uhrig_standard():
    np.testing.assert_allclose(uhrig_sequence(1.0, 1).flips, [0.5], rtol=1e-15)
    np.testing.assert_allclose(uhrig_sequence(1.0, 2).flips, [0.25, 0.75], rtol=1e-14)


def test_uhrig_interval_variant_raises():
    with pytest.raises(SequenceError, match="sin"):
        uhrig_sequence(1.0, 2, variant="interval")


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_nonpositive_tau(bad):
    with pytest.raises(SequenceError):
        periodic_sequence(bad, 3)


def test_custom_validation():
    assert custom_sequence([0.2, 0.7], 1.0).n_flips == 2
    with pytest.raises(SequenceError):
        custom_sequence([0.7, 0.2], 1.0)
    with pytest.raises(SequenceError):
        custom_sequence([1.5], 1.0)
