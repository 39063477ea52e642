"""Moment operators of Haar-random unit vectors on the symmetric subspace.

The N-th moment of a Haar-random complex unit vector is a scalar on the
symmetric subspace: identity divided by binomial(d+N-1, N). The real-sphere
moment is not scalar; its matrix elements in the occupation-number basis
follow from monomial sphere moments, which count perfect matchings with
equal paired indices (Isserlis' theorem restricted to the sphere) divided by
d(d+2)...(d+2N-2). Working in the occupation basis keeps dimensions at
binomial(d+N-1, N) instead of d^N.

`trace_norm_gap` computes the Schatten-1 distance between the two moments
and checks it against the two-term and 4N^2/d bounds, along with positivity
of the remainder left after subtracting the scalar part from the real moment.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

__all__ = [
    "BoundViolationError",
    "BudgetExceededError",
    "DEFAULT_SYM_DIM_BUDGET",
    "GapReport",
    "MAX_MOMENT_COPIES",
    "MomentOperator",
    "Pairing",
    "SymBasis",
    "complex_moment",
    "enumerate_pairings",
    "mc_moment",
    "real_moment",
    "real_monomial_moment",
    "sym_basis",
    "symmetric_embedding",
    "trace_norm_gap",
]

DEFAULT_SYM_DIM_BUDGET = 20_000
MAX_MOMENT_COPIES = 8
MAX_PAIRING_POINTS = 2 * MAX_MOMENT_COPIES

HERMITIAN_ATOL = 1e-10
PSD_ATOL = 1e-10
TRACE_ATOL = 1e-10
BOUND_SLACK = 1e-9


class BudgetExceededError(Exception):
    """A requested (d, N) cell does not fit the configured memory budget."""


class BoundViolationError(RuntimeError):
    """A proven inequality failed numerically; indicates an implementation bug."""


@dataclass(frozen=True)
class SymBasis:
    """Occupation-number basis of the N-fold symmetric subspace over dimension d.

    Elements are ordered by their nondecreasing index tuples, so for d=2, N=2
    the occupations run (2,0), (1,1), (0,2). `norm_factors[b]` is
    sqrt(N!/prod_j m_j!), the normalization of the b-th basis state.
    """

    d: int
    N: int
    occupations: np.ndarray
    norm_factors: np.ndarray

    @property
    def size(self) -> int:
        return self.occupations.shape[0]


def sym_basis(d: int, copies: int, budget: int = DEFAULT_SYM_DIM_BUDGET) -> SymBasis:
    """Enumerate the occupation basis; errors out above the dimension budget."""
    if d < 1 or copies < 1:
        raise ValueError("d and N must be at least 1")
    size = math.comb(d + copies - 1, copies)
    if size > budget:
        raise BudgetExceededError(f"symmetric dimension {size} exceeds budget {budget}")
    occ = np.zeros((size, d), dtype=np.int16)
    norm = np.empty(size, dtype=np.float64)
    n_fact = math.factorial(copies)
    for b, tup in enumerate(itertools.combinations_with_replacement(range(d), copies)):
        counts = np.bincount(tup, minlength=d)
        occ[b] = counts
        denom = 1
        for c in counts:
            if c > 1:
                denom *= math.factorial(int(c))
        norm[b] = math.sqrt(n_fact / denom)
    return SymBasis(d=d, N=copies, occupations=occ, norm_factors=norm)


@dataclass(frozen=True)
class Pairing:
    """A perfect matching of {1, ..., 2N} as N disjoint unordered pairs."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for a, b in self.pairs:
            if a == b or a in seen or b in seen:
                raise ValueError("pairs must be disjoint")
            seen.update((a, b))
        if seen and seen != set(range(1, 2 * len(self.pairs) + 1)):
            raise ValueError("pairs must cover {1, ..., 2N}")


def enumerate_pairings(num_points: int) -> list[Pairing]:
    """All perfect matchings of {1, ..., num_points}; there are (2N-1)!! of them."""
    if num_points % 2:
        raise ValueError("cannot pair an odd number of points")
    if num_points > MAX_PAIRING_POINTS:
        raise BudgetExceededError(f"{num_points} points exceed the cap {MAX_PAIRING_POINTS}")

    def rec(points: list[int]) -> list[list[tuple[int, int]]]:
        if not points:
            return [[]]
        first, rest = points[0], points[1:]
        out = []
        for i, partner in enumerate(rest):
            for tail in rec(rest[:i] + rest[i + 1 :]):
                out.append([(first, partner)] + tail)
        return out

    return [Pairing(tuple(p)) for p in rec(list(range(1, num_points + 1)))]


def _double_factorial(k: int) -> int:
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


@lru_cache(maxsize=None)
def _sphere_moment_denominator(d: int, copies: int) -> int:
    """d(d+2)...(d+2N-2), cross-checked against its Gamma form via log-gamma."""
    denom = 1
    for k in range(copies):
        denom *= d + 2 * k
    gamma_form = copies * math.log(2.0) + math.lgamma(copies + d / 2.0) - math.lgamma(d / 2.0)
    if abs(math.log(float(denom)) - gamma_form) > 1e-10 * max(1.0, abs(gamma_form)):
        raise RuntimeError(f"normalization identity failed at d={d}, N={copies}")
    return denom


def _monomial_moment_from_occupation(alpha: Sequence[int], d: int) -> Fraction:
    total = int(sum(alpha))
    if total % 2:
        return Fraction(0)
    count = 1
    for a in alpha:
        a = int(a)
        if a % 2:
            return Fraction(0)  # an odd power admits no equal-index matching
        if a > 1:
            count *= _double_factorial(a - 1)
    return Fraction(count, _sphere_moment_denominator(d, total // 2))


def real_monomial_moment(indices: Sequence[int], d: int) -> Fraction:
    """E[x_{a_1} ... x_{a_2N}] for x uniform on the real unit sphere in R^d.

    Equals the number of perfect matchings of the positions whose paired
    indices agree, divided by d(d+2)...(d+2N-2). The count factorizes as a
    product of double factorials over index multiplicities.
    """
    for a in indices:
        if not 1 <= a <= d:
            raise ValueError(f"index {a} out of range [1, {d}]")
    alpha = np.bincount(np.asarray(indices, dtype=np.int64) - 1, minlength=d)
    return _monomial_moment_from_occupation(alpha, d)


@dataclass(frozen=True)
class MomentOperator:
    """Expected N-fold tensor power of a random rank-one projector, in SymBasis."""

    field: str  # "real" or "complex"
    d: int
    N: int
    matrix: np.ndarray
    eigenvalues: np.ndarray

    def __post_init__(self):
        m = self.matrix
        dev = float(np.max(np.abs(m - m.conj().T)))
        if dev > HERMITIAN_ATOL:
            raise ValueError(f"moment operator not Hermitian (deviation {dev:.3e})")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"moment operator trace {tr} deviates from 1")
        if float(np.min(self.eigenvalues)) < -PSD_ATOL:
            raise ValueError(
                f"moment operator not PSD (min eigenvalue {float(np.min(self.eigenvalues)):.3e})"
            )


def real_moment(d: int, copies: int, budget: int = DEFAULT_SYM_DIM_BUDGET) -> MomentOperator:
    """Exact real-sphere moment operator assembled from monomial moments.

    A matrix element <m|E|m'> equals norm_m * norm_m' times the monomial
    moment of the combined occupation m + m', which vanishes unless m and m'
    have identical parity patterns. Elements are therefore grouped by parity
    so only the nonzero blocks are visited.
    """
    if copies > MAX_MOMENT_COPIES:
        raise BudgetExceededError(f"N={copies} exceeds the cap {MAX_MOMENT_COPIES}")
    basis = sym_basis(d, copies, budget)
    size = basis.size
    occ = basis.occupations
    nf = basis.norm_factors
    matrix = np.zeros((size, size), dtype=np.float64)

    classes: dict[bytes, list[int]] = {}
    for b in range(size):
        classes.setdefault((occ[b] & 1).tobytes(), []).append(b)

    for rows in classes.values():
        for i, a in enumerate(rows):
            occ_a = occ[a]
            for b in rows[i:]:
                alpha = occ_a + occ[b]
                value = nf[a] * nf[b] * float(_monomial_moment_from_occupation(alpha, d))
                matrix[a, b] = value
                matrix[b, a] = value

    eigenvalues = np.linalg.eigvalsh(matrix)
    return MomentOperator(field="real", d=d, N=copies, matrix=matrix, eigenvalues=eigenvalues)


def complex_moment(d: int, copies: int, budget: int = DEFAULT_SYM_DIM_BUDGET) -> MomentOperator:
    """Complex-sphere moment operator: identity over the symmetric dimension."""
    basis = sym_basis(d, copies, budget)
    size = basis.size
    matrix = np.eye(size, dtype=np.float64) / size
    eigenvalues = np.full(size, 1.0 / size)
    return MomentOperator(field="complex", d=d, N=copies, matrix=matrix, eigenvalues=eigenvalues)


def symmetric_embedding(basis: SymBasis, max_full_dim: int = 1 << 16) -> np.ndarray:
    """Isometry V from the occupation basis into the full d^N tensor space.

    Column b spreads amplitude sqrt(prod_j m_j!/N!) over every distinct
    arrangement of the element's index tuple; V^T V = identity.
    """
    full_dim = basis.d**basis.N
    if full_dim > max_full_dim:
        raise BudgetExceededError(f"full tensor dimension {full_dim} exceeds {max_full_dim}")
    v = np.zeros((full_dim, basis.size), dtype=np.float64)
    for b in range(basis.size):
        tup = np.repeat(np.arange(basis.d), basis.occupations[b])
        amp = 1.0 / basis.norm_factors[b]
        for arrangement in set(itertools.permutations(tup.tolist())):
            row = 0
            for idx in arrangement:
                row = row * basis.d + idx
            v[row, b] = amp
    return v


def mc_moment(
    d: int,
    copies: int,
    samples: int,
    field: str,
    rng: np.random.Generator,
    budget: int = DEFAULT_SYM_DIM_BUDGET,
    chunk: int = 100_000,
) -> tuple[MomentOperator, np.ndarray]:
    """Monte Carlo estimate of a moment operator with entrywise standard errors.

    Each sampled unit vector v contributes the rank-one projector onto its
    symmetric coefficients w_m = norm_m * prod_j v_j^{m_j}; |w| is a unit
    vector, so the estimate has exact trace one and is PSD by construction.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if field not in ("real", "complex"):
        raise ValueError(f"unknown field {field!r}")
    basis = sym_basis(d, copies, budget)
    size = basis.size
    dtype = np.float64 if field == "real" else np.complex128
    accum = np.zeros((size, size), dtype=dtype)
    sq_accum = np.zeros((size, size), dtype=np.float64)

    remaining = samples
    while remaining > 0:
        m = min(chunk, remaining)
        remaining -= m
        if field == "real":
            vecs = rng.standard_normal((m, d))
        else:
            vecs = rng.standard_normal((m, d)) + 1j * rng.standard_normal((m, d))
        vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
        w = np.empty((m, size), dtype=dtype)
        for b in range(size):
            col = np.full(m, basis.norm_factors[b], dtype=dtype)
            for j in np.nonzero(basis.occupations[b])[0]:
                col = col * vecs[:, j] ** int(basis.occupations[b, j])
            w[:, b] = col
        accum += w.T @ w.conj()
        abs_sq = (w.real**2 + w.imag**2) if np.iscomplexobj(w) else w**2
        sq_accum += abs_sq.T @ abs_sq

    estimate = accum / samples
    estimate = (estimate + estimate.conj().T) / 2.0
    second_moment = sq_accum / samples
    variance = np.maximum(second_moment - np.abs(estimate) ** 2, 0.0)
    stderr = np.sqrt(variance / samples)
    eigenvalues = np.linalg.eigvalsh(estimate)
    op = MomentOperator(
        field=field, d=d, N=copies, matrix=estimate.astype(np.complex128), eigenvalues=eigenvalues
    )
    return op, stderr


@dataclass(frozen=True)
class GapReport:
    """Trace-norm gap between the two moment operators and its bound chain."""

    d: int
    N: int
    sym_dim: int
    gap: float
    bound_two_term: float
    bound_final: float
    middle_term: float
    o_rest_min_eig: float
    mc_max_dev: float | None = None


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise BoundViolationError(message)


def trace_norm_gap(
    d: int,
    copies: int,
    mc_samples: int | None = None,
    rng: np.random.Generator | None = None,
    budget: int = DEFAULT_SYM_DIM_BUDGET,
) -> GapReport:
    """Gap ||E_complex - E_real||_1 with every inequality of its bound chain checked.

    Verifies 0 <= gap <= 2(1 - (1+2N/d)^-N) <= 4N^2/d and that the remainder
    E_real - (N!/(d(d+2)...(d+2N-2))) * I is PSD. The middle quantity
    1 - (d+N-1)!(d/2-1)!/(2^N (d/2+N-1)!(d-1)!) is reported for inspection
    but not asserted against on its own. At tiny sizes the swapped 2N-copy
    pair is materialized densely and its distance checked against 2 * gap.
    Violations raise BoundViolationError: they indicate a bug, not bad luck.
    """
    e_real = real_moment(d, copies, budget)
    size = e_real.matrix.shape[0]
    lam = e_real.eigenvalues

    # E_complex is identity/size on the same basis, so the difference spectrum
    # is 1/size - lam exactly.
    gap = float(np.sum(np.abs(1.0 / size - lam)))

    scalar = Fraction(math.factorial(copies), _sphere_moment_denominator(d, copies))
    o_rest_min_eig = float(lam[0]) - float(scalar)

    middle_term = 1.0 - math.exp(
        math.lgamma(d + copies)
        - math.lgamma(d)
        + math.lgamma(d / 2.0)
        - copies * math.log(2.0)
        - math.lgamma(d / 2.0 + copies)
    )
    bound_two_term = 2.0 * (1.0 - (1.0 + 2.0 * copies / d) ** (-copies))
    bound_final = 4.0 * copies**2 / d

    _check(gap >= -BOUND_SLACK, f"negative gap {gap} at d={d}, N={copies}")
    _check(
        gap <= bound_two_term + BOUND_SLACK,
        f"gap {gap} exceeds two-term bound {bound_two_term} at d={d}, N={copies}",
    )
    _check(
        bound_two_term <= bound_final + BOUND_SLACK,
        f"two-term bound {bound_two_term} exceeds {bound_final} at d={d}, N={copies}",
    )
    _check(
        o_rest_min_eig >= -BOUND_SLACK,
        f"scalar-subtracted remainder not PSD ({o_rest_min_eig}) at d={d}, N={copies}",
    )

    if d <= 3 and copies <= 2:
        basis = sym_basis(d, copies, budget)
        v = symmetric_embedding(basis)
        e_real_full = v @ e_real.matrix @ v.T
        e_complex_full = (v @ v.T) / size
        rho_a = np.kron(e_complex_full, e_real_full)
        rho_b = np.kron(e_real_full, e_complex_full)
        swapped = float(np.sum(np.abs(np.linalg.eigvalsh(rho_a - rho_b))))
        _check(
            swapped <= 2.0 * gap + BOUND_SLACK,
            f"swapped-pair distance {swapped} exceeds 2*gap {2 * gap} at d={d}, N={copies}",
        )

    mc_max_dev = None
    if mc_samples is not None:
        if rng is None:
            raise ValueError("mc_samples requires an rng")
        mc_real, _ = mc_moment(d, copies, mc_samples, "real", rng, budget)
        mc_complex, _ = mc_moment(d, copies, mc_samples, "complex", rng, budget)
        e_complex = complex_moment(d, copies, budget)
        mc_max_dev = max(
            float(np.max(np.abs(mc_real.matrix - e_real.matrix))),
            float(np.max(np.abs(mc_complex.matrix - e_complex.matrix))),
        )

    return GapReport(
        d=d,
        N=copies,
        sym_dim=size,
        gap=gap,
        bound_two_term=bound_two_term,
        bound_final=bound_final,
        middle_term=middle_term,
        o_rest_min_eig=o_rest_min_eig,
        mc_max_dev=mc_max_dev,
    )
