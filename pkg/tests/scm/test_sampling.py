# This file is part of ts_lcmkit.
#
# Developed for the Vera Rubin Observatory Systems.
# This product includes software developed by the LSST Project
# (https://www.lsst.org).
# See the COPYRIGHT file at the top-level directory of this distribution
# for details of code ownership.
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

import numpy as np
import pytest
from lsst.ts.lcmkit import ContractError, DimensionError
from lsst.ts.lcmkit.datasets import IdentityDecoder, build_linear_scaling
from lsst.ts.lcmkit.scm import (
    EMPTY_TARGET,
    InterventionPrior,
    InterventionTarget,
    PairDataset,
    WeakPair,
    sample_weak_pairs,
    verify_noise_invariance,
)
from scipy.stats import chisquare


@pytest.fixture
def pairs() -> PairDataset:
    scm, decoder = build_linear_scaling(4, seed=0)
    return sample_weak_pairs(scm, decoder, 10000, InterventionPrior.uniform(4), np.random.default_rng(0))


def test_intervention_target() -> None:
    target = InterventionTarget(frozenset({2}))

    assert target.index == 2
    assert 2 in target
    assert np.array_equal(target.mask(3), [False, False, True])
    assert InterventionTarget.from_index(EMPTY_TARGET).is_empty
    assert InterventionTarget().index == EMPTY_TARGET


def test_intervention_target_exception() -> None:
    with pytest.raises(ContractError):
        InterventionTarget(frozenset({0, 1}))

    with pytest.raises(ContractError):
        InterventionTarget(frozenset({-2}))

    with pytest.raises(ContractError):
        InterventionTarget(frozenset({0, 1}), atomic=False).index


def test_intervention_prior() -> None:
    prior = InterventionPrior.uniform(3)
    targets = prior.sample(1000, np.random.default_rng(0))

    assert prior.n == 3
    assert prior.has_full_support
    assert set(np.unique(targets)) == {-1, 0, 1, 2}


def test_intervention_prior_exception() -> None:
    with pytest.raises(ContractError):
        InterventionPrior([0.5, 0.6])

    with pytest.raises(ContractError):
        InterventionPrior([1.0])


def test_sample_weak_pairs(pairs: PairDataset) -> None:
    assert len(pairs) == 10000
    assert pairs.has_truth
    assert pairs.data_dim == 4
    assert pairs.latent_dim == 4
    assert verify_noise_invariance(pairs)


def test_sample_weak_pairs_frequency(pairs: PairDataset) -> None:
    counts = np.bincount(pairs.targets + 1, minlength=5)

    assert chisquare(counts).pvalue > 1e-4


def test_sample_weak_pairs_descendants() -> None:
    scm, decoder = build_linear_scaling(4, seed=1)
    pairs = sample_weak_pairs(scm, decoder, 2000, InterventionPrior.uniform(4), np.random.default_rng(1))

    for idx in range(4):
        rows = pairs.targets == idx
        changed = np.any(pairs.z[rows] != pairs.z_tilde[rows], axis=0)
        affected = {idx} | scm.dag.descendants(idx)

        assert set(np.flatnonzero(changed)) <= affected

    empty = pairs.targets == EMPTY_TARGET
    assert np.allclose(pairs.x[empty], pairs.x_tilde[empty])


def test_sample_weak_pairs_exception() -> None:
    scm, _ = build_linear_scaling(3, seed=0)

    with pytest.raises(DimensionError):
        sample_weak_pairs(scm, IdentityDecoder(2), 10, InterventionPrior.uniform(3), np.random.default_rng(0))

    with pytest.raises(DimensionError):
        sample_weak_pairs(scm, IdentityDecoder(3), 10, InterventionPrior.uniform(2), np.random.default_rng(0))


def test_pair_dataset(pairs: PairDataset) -> None:
    pair = pairs[3]
    subset = pairs[10:20]

    assert isinstance(pair, WeakPair)
    assert pair.has_truth
    assert np.array_equal(pair.x, pairs.x[3])
    assert len(subset) == 10
    assert np.array_equal(subset.targets, pairs.targets[10:20])

    with pytest.raises(IndexError):
        pairs[10000]


def test_pair_dataset_without_truth() -> None:
    pairs = PairDataset(np.zeros((5, 2)), np.ones((5, 2)))

    assert not pairs.has_truth
    assert pairs.latent_dim is None
    assert pairs[0].target is None

    with pytest.raises(ContractError):
        verify_noise_invariance(pairs)

    with pytest.raises(DimensionError):
        PairDataset(np.zeros((5, 2)), np.ones((4, 2)))


def test_pair_dataset_batches(pairs: PairDataset) -> None:
    batches = list(pairs[:250].iter_batches(100))
    batch = pairs.sample_batch(32, np.random.default_rng(0))

    assert [len(item) for item in batches] == [100, 100, 50]
    assert len(batch) == 32


def test_pair_dataset_from_pairs(pairs: PairDataset) -> None:
    rebuilt = PairDataset.from_pairs([pairs[idx] for idx in range(5)])

    assert np.array_equal(rebuilt.e, pairs.e[:5])
    assert np.array_equal(rebuilt.targets, pairs.targets[:5])
    assert verify_noise_invariance([pairs[idx] for idx in range(5)])


def test_verify_noise_invariance_violation(pairs: PairDataset) -> None:
    broken = pairs[:100]
    broken.e_tilde[:, 0] += 1.0

    assert not verify_noise_invariance(broken)
