import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from outlierkit.core import validate_dataset
from outlierkit.split import SplitMix64, permutation, split_sizes, train_test_split


def test_splitmix64_reference_vectors():
    # published outputs of the reference SplitMix64 generator
    gen = SplitMix64(0)
    assert [gen.next() for _ in range(3)] == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]
    gen = SplitMix64(1234567)
    assert [gen.next() for _ in range(5)] == [
        6457827717110365317, 3203168211198807973, 9817491932198370423,
        4593380528125082431, 16408922859458223821,
    ]


def test_frozen_permutations():
    assert permutation(10, 7).tolist() == [8, 1, 5, 9, 0, 4, 3, 2, 6, 7]
    assert permutation(10, 0).tolist() == [6, 3, 2, 9, 8, 1, 4, 7, 0, 5]


def test_below_is_in_range():
    gen = SplitMix64(99)
    draws = [gen.below(3) for _ in range(3000)]
    assert set(draws) == {0, 1, 2}
    assert all(abs(draws.count(v) - 1000) < 120 for v in range(3))


@given(st.integers(0, 200), st.integers(0, 2**64 - 1))
def test_permutation_is_a_permutation(n, seed):
    p = permutation(n, seed)
    assert sorted(p.tolist()) == list(range(n))
    assert np.array_equal(p, permutation(n, seed))


def test_split_sizes():
    assert split_sizes(10, 0.7) == (7, 3)
    assert split_sizes(525, 0.7) == (367, 158)
    # 0.29 * 100 is 28.999999999999996 in binary floating point
    assert split_sizes(100, 0.29) == (29, 71)
    for f in (0.0, 1.0, -0.5):
        with pytest.raises(ValueError):
            split_sizes(10, f)


def test_split_keeps_rows_and_labels_together():
    X = np.arange(20.0).reshape(10, 2)
    labels = ["outlier" if i % 4 == 0 else "normal" for i in range(10)]
    ds = validate_dataset(X, labels)
    train, test = train_test_split(ds, 0.6, seed=3)
    assert (train.n_samples, test.n_samples) == (6, 4)
    for part in (train, test):
        for row, lab in zip(part.features, part.labels):
            i = int(row[0] // 2)
            assert lab.value == labels[i]
    rows = sorted(np.vstack([train.features, test.features])[:, 0].tolist())
    assert rows == X[:, 0].tolist()
    again = train_test_split(ds, 0.6, seed=3)
    assert again[0] == train and again[1] == test
