import numpy as np
import pytest

from fgnsr.baselines import RankExhausted, normalize_columns_l1, snpa, spa, xray_max
from fgnsr.synthgen import gen_middlepoint, gen_scaled_middlepoint


def test_spa_hand_example():
    sel = spa([[1, 0, 0.5], [0, 1, 0.5]], 2)
    assert sel.K == [0, 1]


def test_spa_identity():
    assert spa(np.eye(3), 3).K == [0, 1, 2]
    assert snpa(np.eye(3), 3).K == [0, 1, 2]


def test_spa_residual_decreases():
    M = np.random.default_rng(3).random((12, 20))
    sel = spa(M, 8)
    res = [np.linalg.norm(M)] + sel.residual_norms
    assert all(b < a for a, b in zip(res, res[1:]))


def test_spa_rank_exhausted():
    M = np.outer([1.0, 2.0], [1.0, 1.0, 3.0])
    with pytest.raises(RankExhausted):
        spa(M, 2)


def test_snpa_equals_spa_on_orthogonal_columns():
    rng = np.random.default_rng(0)
    Q = np.diag(rng.uniform(0.5, 2.0, 6))
    assert snpa(Q, 4).K == spa(Q, 4).K


@pytest.mark.parametrize("seed", range(25))
def test_noiseless_recovery_all_baselines(seed):
    r = 3 + seed % 8
    inst = gen_middlepoint(20 + r, r, 0.0, seed)
    scaled = gen_scaled_middlepoint(20 + r, r, 0.0, 4.0, seed)
    for algo in (spa, snpa, xray_max):
        assert set(algo(inst.M, r).K) == set(inst.K_true)
    # conic mixtures: XRAY works on raw data, SPA/SNPA after l1 normalisation
    assert set(xray_max(scaled.M, r).K) == set(scaled.K_true)
    assert set(spa(normalize_columns_l1(scaled.M), r).K) == set(scaled.K_true)
    assert set(snpa(normalize_columns_l1(scaled.M), r).K) == set(scaled.K_true)


def test_xray_units():
    assert xray_max(np.eye(2), 2).K == [0, 1]


def test_xray_rejects_negative():
    with pytest.raises(ValueError, match="nonnegative"):
        xray_max([[1.0, -0.1], [0.0, 1.0]], 1)
    assert len(xray_max([[1.0, -0.1], [0.0, 1.0]], 1, allow_negative=True).K) == 1


def test_xray_duplicate_picked_once():
    # columns 0 and 1 coincide; column 2 is the other extreme ray
    M = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.5, 0.5, 0.2]])
    K = xray_max(M, 2).K
    assert 2 in K and len({0, 1} & set(K)) == 1


def test_permutation_equivariance():
    inst = gen_middlepoint(30, 5, 0.02, 7)
    perm = np.random.default_rng(1).permutation(inst.M.shape[1])
    Mp = inst.M[:, perm]
    for algo in (spa, snpa, lambda A, r: xray_max(A, r, allow_negative=True)):
        K = algo(inst.M, 5).K
        Kp = algo(Mp, 5).K
        assert sorted(perm[Kp]) == sorted(K)


def test_bad_r():
    with pytest.raises(ValueError):
        spa(np.eye(3), 0)
    with pytest.raises(ValueError):
        snpa(np.eye(3), 4)
