"""Density-operator discrimination: trace norms, optimal-measurement success,
and the N-copy closed forms for the minus-sign families.

Convention: ||M||_1 is the Schatten-1 norm (sum of singular values), so two
orthogonal pure states differ by norm 2 and the optimal success probability
for equal priors is 1/2 + ||rho_a - rho_b||_1 / 4. A success threshold of 0.9
therefore corresponds to Schatten-1 norm 1.6 (trace distance 0.8).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from pathlib import Path
from typing import Sequence

import numpy as np

__all__ = [
    "DensityOperator",
    "HELSTROM_SCHATTEN_THRESHOLD",
    "Statevector",
    "helstrom_success",
    "load_density_operator",
    "min_copies_minus_sign",
    "ncopy_minus_sign_tracenorm",
    "ncopy_minus_sign_tracenorm_dense",
    "random_density_operator",
    "save_density_operator",
    "schatten1_diff",
    "simulate_discrimination",
]

HERMITIAN_ATOL = 1e-10
PSD_ATOL = 1e-10
TRACE_ATOL = 1e-10
STATE_NORM_ATOL = 1e-10

# Schatten-1 threshold equivalent to distinguishing with probability 0.9.
HELSTROM_SCHATTEN_THRESHOLD = 1.6

# Relative eigenvalue floor: |lambda| below this times dimension counts as zero.
_EIG_ZERO_REL = 1e-12


@dataclass(frozen=True)
class Statevector:
    """Unit-norm amplitude vector on n qubits."""

    amplitudes: np.ndarray
    n: int

    def __post_init__(self):
        arr = np.asarray(self.amplitudes, dtype=np.complex128)
        object.__setattr__(self, "amplitudes", arr)
        if arr.ndim != 1 or arr.size != 1 << self.n:
            raise ValueError(f"expected 2^{self.n} amplitudes, got shape {arr.shape}")
        nrm = np.linalg.norm(arr)
        if abs(nrm - 1.0) > STATE_NORM_ATOL:
            raise ValueError(f"state norm {nrm} deviates from 1 beyond {STATE_NORM_ATOL}")


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, positive semi-definite, trace-one matrix.

    Construction symmetrizes floating-point drift via (M + M^dag)/2 when the
    deviation is within tolerance and rejects anything worse.
    """

    matrix: np.ndarray
    dim: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density operator must be a square matrix")
        if m.shape[0] != self.dim:
            raise ValueError(f"dim field {self.dim} does not match shape {m.shape}")
        dev = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
        if dev > HERMITIAN_ATOL:
            raise ValueError(f"matrix is non-Hermitian beyond tolerance ({dev:.3e})")
        m = (m + m.conj().T) / 2.0
        object.__setattr__(self, "matrix", m)
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"trace {tr} deviates from 1 beyond {TRACE_ATOL}")
        min_eig = float(np.linalg.eigvalsh(m)[0])
        if min_eig < -PSD_ATOL:
            raise ValueError(f"matrix is not PSD (min eigenvalue {min_eig:.3e})")

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "DensityOperator":
        matrix = np.asarray(matrix, dtype=np.complex128)
        return cls(matrix=matrix, dim=matrix.shape[0])

    @classmethod
    def from_pure(cls, state: Statevector | np.ndarray | Sequence[complex]) -> "DensityOperator":
        vec = state.amplitudes if isinstance(state, Statevector) else np.asarray(state, dtype=np.complex128)
        nrm = np.linalg.norm(vec)
        if abs(nrm - 1.0) > STATE_NORM_ATOL:
            raise ValueError(f"pure state norm {nrm} deviates from 1")
        return cls(matrix=np.outer(vec, vec.conj()), dim=vec.size)


def _schatten1_hermitian(matrix: np.ndarray) -> float:
    """Sum of absolute eigenvalues, with a roundoff floor for tiny ones."""
    eigs = np.linalg.eigvalsh(matrix)
    floor = _EIG_ZERO_REL * matrix.shape[0]
    eigs = np.where(np.abs(eigs) < floor, 0.0, eigs)
    return float(np.sum(np.abs(eigs)))


def schatten1_diff(a: DensityOperator, b: DensityOperator) -> float:
    """||a - b||_1 via Hermitian eigendecomposition of the difference."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return _schatten1_hermitian(a.matrix - b.matrix)


def helstrom_success(a: DensityOperator, b: DensityOperator) -> float:
    """Optimal success probability for equal-prior discrimination of a vs b."""
    p = 0.5 + 0.25 * schatten1_diff(a, b)
    return min(max(p, 0.5), 1.0)


def ncopy_minus_sign_tracenorm(d: int, copies: int) -> float:
    """Closed-form Schatten-1 distance between the N-copy sign-flip pair.

    The two hypotheses are pure product states whose overlap is c^(2N) with
    c = 1 - 2/d, giving 2*sqrt(1 - c^(4N)). Grows toward 2 as N grows, so a
    fixed discrimination threshold forces N to scale linearly with d.
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if copies < 1:
        raise ValueError("copies must be at least 1")
    c = 1.0 - 2.0 / d
    return 2.0 * math.sqrt(max(0.0, 1.0 - c ** (4 * copies)))


def ncopy_minus_sign_tracenorm_dense(d: int, copies: int, max_dim: int = 8192) -> float:
    """Independent check: materialize both N-copy operators and eigendecompose."""
    if d ** (2 * copies) > max_dim:
        raise ValueError(f"dense cross-check dimension {d ** (2 * copies)} exceeds {max_dim}")
    plus = np.full(d, 1.0 / math.sqrt(d))
    minus = plus.copy()
    minus[0] *= -1.0
    u = reduce(np.kron, [minus] * copies + [plus] * copies)
    v = reduce(np.kron, [plus] * copies + [minus] * copies)
    diff = np.outer(u, u) - np.outer(v, v)
    return _schatten1_hermitian(diff)


def min_copies_minus_sign(d: int, threshold: float = HELSTROM_SCHATTEN_THRESHOLD) -> int:
    """Smallest N whose N-copy trace norm reaches the threshold."""
    if d < 3:
        raise ValueError("dimension must be at least 3 (at d=2 one copy is already perfect)")
    if not 0.0 < threshold < 2.0:
        raise ValueError("threshold must lie in (0, 2)")
    c = 1.0 - 2.0 / d
    # need c^(4N) <= 1 - (threshold/2)^2; start below the analytic estimate
    target = 1.0 - (threshold / 2.0) ** 2
    estimate = math.ceil(math.log(target) / (4.0 * math.log(c)))
    copies = max(1, estimate - 2)
    while ncopy_minus_sign_tracenorm(d, copies) < threshold:
        copies += 1
    while copies > 1 and ncopy_minus_sign_tracenorm(d, copies - 1) >= threshold:
        copies -= 1
    return copies


def simulate_discrimination(
    a: DensityOperator, b: DensityOperator, trials: int, rng: np.random.Generator
) -> float:
    """Empirical success rate of the optimal two-outcome measurement.

    Measures the projector onto the nonnegative eigenspace of a - b on states
    drawn with equal priors; guesses `a` on the projecting outcome.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    eigvals, eigvecs = np.linalg.eigh(a.matrix - b.matrix)
    positive = eigvecs[:, eigvals >= 0.0]
    projector = positive @ positive.conj().T
    p_click_a = float(np.trace(projector @ a.matrix).real)
    p_click_b = float(np.trace(projector @ b.matrix).real)
    p_click_a = min(max(p_click_a, 0.0), 1.0)
    p_click_b = min(max(p_click_b, 0.0), 1.0)

    truth_is_a = rng.integers(2, size=trials).astype(bool)
    click_prob = np.where(truth_is_a, p_click_a, p_click_b)
    clicked = rng.random(trials) < click_prob
    successes = np.sum(clicked == truth_is_a)
    return float(successes) / trials


def random_density_operator(
    dim: int, rng: np.random.Generator, rank: int | None = None
) -> DensityOperator:
    """Random full- or fixed-rank density operator from a Ginibre factor."""
    if rank is None:
        rank = dim
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    return DensityOperator.from_matrix(m / np.trace(m).real)


def save_density_operator(path: str | Path, rho: DensityOperator) -> None:
    """Write `dim <k>` header then row-major `<re> <im>` pairs, one row per line."""
    with open(path, "w") as fh:
        fh.write(f"dim {rho.dim}\n")
        for row in rho.matrix:
            fh.write(" ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row) + "\n")


def load_density_operator(path: str | Path) -> DensityOperator:
    """Parse the density-operator text format (`#` begins a comment line)."""
    tokens: list[str] = []
    dim = None
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if dim is None:
                if parts[0] != "dim" or len(parts) != 2:
                    raise ValueError(f"{path}: expected `dim <k>` header, got {line!r}")
                dim = int(parts[1])
                continue
            tokens.extend(parts)
    if dim is None:
        raise ValueError(f"{path}: missing `dim <k>` header")
    if len(tokens) != 2 * dim * dim:
        raise ValueError(f"{path}: expected {2 * dim * dim} numbers, found {len(tokens)}")
    flat = np.asarray([float(t) for t in tokens], dtype=np.float64)
    matrix = (flat[0::2] + 1j * flat[1::2]).reshape(dim, dim)
    return DensityOperator.from_matrix(matrix)
