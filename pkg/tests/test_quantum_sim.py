"""Discrimination-toolkit tests: norms, success probabilities, N-copy forms."""

import math

import numpy as np
import pytest

from sqlab.quantum_sim import (
    DensityOperator,
    Statevector,
    helstrom_success,
    load_density_operator,
    min_copies_minus_sign,
    ncopy_minus_sign_tracenorm,
    ncopy_minus_sign_tracenorm_dense,
    random_density_operator,
    save_density_operator,
    schatten1_diff,
    simulate_discrimination,
)


def _pure(vec) -> DensityOperator:
    vec = np.asarray(vec, dtype=np.complex128)
    return DensityOperator.from_pure(vec / np.linalg.norm(vec))


def _overlap_pair(c: float) -> tuple[DensityOperator, DensityOperator]:
    """Two real pure states with inner product c."""
    a = np.array([1.0, 0.0])
    b = np.array([c, math.sqrt(1 - c * c)])
    return _pure(a), _pure(b)


def test_statevector_validation():
    Statevector(np.array([1.0, 0.0]), n=1)
    with pytest.raises(ValueError, match="amplitudes"):
        Statevector(np.array([1.0, 0.0, 0.0]), n=1)
    with pytest.raises(ValueError, match="norm"):
        Statevector(np.array([1.0, 1.0]), n=1)


def test_density_operator_validation():
    with pytest.raises(ValueError, match="non-Hermitian"):
        DensityOperator.from_matrix(np.array([[0.5, 0.5], [0.0, 0.5]]))
    with pytest.raises(ValueError, match="trace"):
        DensityOperator.from_matrix(np.eye(2))
    with pytest.raises(ValueError, match="PSD"):
        DensityOperator.from_matrix(np.diag([1.5, -0.5]))
    with pytest.raises(ValueError, match="square"):
        DensityOperator.from_matrix(np.ones((2, 3)))


def test_schatten_basics():
    rho = random_density_operator(4, np.random.default_rng(0))
    assert schatten1_diff(rho, rho) == 0.0
    zero, one = _pure([1, 0]), _pure([0, 1])
    assert schatten1_diff(zero, one) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(ValueError, match="mismatch"):
        schatten1_diff(zero, random_density_operator(4, np.random.default_rng(1)))


@pytest.mark.parametrize("c", [0.0, 0.25, 0.5, 0.9, 0.999])
def test_schatten_pure_overlap_closed_form(c):
    a, b = _overlap_pair(c)
    assert schatten1_diff(a, b) == pytest.approx(2.0 * math.sqrt(1 - c * c), abs=1e-10)


def test_schatten_metric_properties_on_random_triples():
    rng = np.random.default_rng(42)
    for _ in range(100):
        dim = int(rng.integers(2, 17))
        a, b, c = (random_density_operator(dim, rng) for _ in range(3))
        d_ab, d_ba = schatten1_diff(a, b), schatten1_diff(b, a)
        assert d_ab == pytest.approx(d_ba, abs=1e-10)
        assert d_ab >= 0.0
        assert d_ab <= schatten1_diff(a, c) + schatten1_diff(c, b) + 1e-10


def test_helstrom_success_range_and_extremes():
    rho = random_density_operator(3, np.random.default_rng(7))
    assert helstrom_success(rho, rho) == 0.5
    zero, one = _pure([1, 0]), _pure([0, 1])
    assert helstrom_success(zero, one) == pytest.approx(1.0, abs=1e-12)
    for c in (0.1, 0.5, 0.9):
        a, b = _overlap_pair(c)
        assert 0.5 <= helstrom_success(a, b) <= 1.0


def test_helstrom_one_iff_orthogonal_supports():
    # block-diagonal states with disjoint supports vs overlapping ones
    disjoint_a = DensityOperator.from_matrix(np.diag([0.5, 0.5, 0.0, 0.0]))
    disjoint_b = DensityOperator.from_matrix(np.diag([0.0, 0.0, 0.7, 0.3]))
    assert helstrom_success(disjoint_a, disjoint_b) == pytest.approx(1.0, abs=1e-12)
    overlapping = DensityOperator.from_matrix(np.diag([0.4, 0.2, 0.4, 0.0]))
    assert helstrom_success(disjoint_a, overlapping) < 1.0 - 1e-6


def test_minus_sign_pair_orthogonal_at_d2():
    # at d=2 the flipped vector is orthogonal, so one copy discriminates perfectly
    assert ncopy_minus_sign_tracenorm(2, 1) == pytest.approx(2.0)
    plus = np.full(2, 1 / math.sqrt(2))
    minus = plus * np.array([-1, 1])
    assert helstrom_success(_pure(plus), _pure(minus)) == pytest.approx(1.0, abs=1e-12)


def test_ncopy_examples():
    assert ncopy_minus_sign_tracenorm(4, 1) == pytest.approx(2 * math.sqrt(15 / 16), abs=1e-12)
    # overlap -> 1 as d grows, so the one-copy norm tends to zero
    assert ncopy_minus_sign_tracenorm(1 << 20, 1) < 0.01
    with pytest.raises(ValueError):
        ncopy_minus_sign_tracenorm(1, 1)
    with pytest.raises(ValueError):
        ncopy_minus_sign_tracenorm(4, 0)


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("copies", [1, 2, 3])
def test_ncopy_closed_form_matches_dense(d, copies):
    closed = ncopy_minus_sign_tracenorm(d, copies)
    dense = ncopy_minus_sign_tracenorm_dense(d, copies)
    assert closed == pytest.approx(dense, abs=1e-9)


def test_ncopy_dense_budget():
    with pytest.raises(ValueError, match="exceeds"):
        ncopy_minus_sign_tracenorm_dense(64, 4)


def test_ncopy_monotone_in_copies():
    for d in (3, 4, 16, 1024):
        values = [ncopy_minus_sign_tracenorm(d, n) for n in range(1, 30)]
        assert all(a <= b + 1e-15 for a, b in zip(values, values[1:]))


def test_min_copies_examples():
    assert min_copies_minus_sign(4, 0.8) == 1
    assert min_copies_minus_sign(3, 1.99) >= 1  # finite: the limit is 2
    with pytest.raises(ValueError):
        min_copies_minus_sign(2, 0.8)
    with pytest.raises(ValueError):
        min_copies_minus_sign(8, 2.0)


def test_min_copies_is_exact_threshold():
    for d, threshold in ((64, 0.8), (256, 1.6), (4096, 1.2)):
        n_min = min_copies_minus_sign(d, threshold)
        assert ncopy_minus_sign_tracenorm(d, n_min) >= threshold
        if n_min > 1:
            assert ncopy_minus_sign_tracenorm(d, n_min - 1) < threshold


def test_min_copies_doubling_ratio():
    # linear-in-d scaling: doubling d doubles the copy requirement within 10%
    for d in (512, 1024, 2048):
        ratio = min_copies_minus_sign(2 * d, 0.8) / min_copies_minus_sign(d, 0.8)
        assert abs(ratio - 2.0) < 0.2


def test_simulate_discrimination_extremes():
    rng = np.random.default_rng(10)
    rho = random_density_operator(4, rng)
    rate_same = simulate_discrimination(rho, rho, 10_000, rng)
    assert abs(rate_same - 0.5) < 0.015  # 3 sigma
    zero, one = _pure([1, 0]), _pure([0, 1])
    assert simulate_discrimination(zero, one, 10_000, rng) == 1.0


def test_simulate_discrimination_matches_formula():
    rng = np.random.default_rng(11)
    for _ in range(5):
        dim = int(rng.integers(2, 17))
        a, b = random_density_operator(dim, rng), random_density_operator(dim, rng)
        p = helstrom_success(a, b)
        rate = simulate_discrimination(a, b, 10_000, rng)
        sigma = math.sqrt(p * (1 - p) / 10_000)
        assert abs(rate - p) <= 3 * sigma + 1e-12
    with pytest.raises(ValueError):
        simulate_discrimination(a, b, 0, rng)


def test_density_operator_file_round_trip(tmp_path):
    rho = random_density_operator(5, np.random.default_rng(12))
    path = tmp_path / "rho.txt"
    save_density_operator(path, rho)
    loaded = load_density_operator(path)
    assert np.array_equal(loaded.matrix, rho.matrix)
    bad = tmp_path / "bad.txt"
    bad.write_text("2\n1 0 0 0\n")
    with pytest.raises(ValueError, match="header"):
        load_density_operator(bad)
