"""Problem-instance generators for the three vector-search tasks.

Each instance holds C oracle handles, exactly one of which is distinguished:
a single flipped sign among unit-magnitude components (normalized or not), or
a real vector hidden among complex ones. The distinguished position k* is
kept private and reachable only through `verify_answer`, so solver code
cannot accidentally read the answer.

Generation is a pure function of (parameters, seed): every random stream is
derived from the seed through `numpy.random.SeedSequence` spawn keys, one
stream per vector, so instances are reproducible under parallel sweeps.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .sq_oracle import (
    ImplicitVector,
    KIND_ALL_PLUS,
    KIND_MINUS_AT_INDEX,
    SqHandle,
    build_dense,
    build_implicit,
    load_dense_vector,
    materialize,
    save_dense_vector,
)

__all__ = [
    "DEFAULT_DENSE_BUDGET_N",
    "HaarSample",
    "MINUS_SIGN",
    "ProblemInstance",
    "REAL_SEARCH",
    "UNNORMALIZED_MINUS",
    "dump_instance",
    "gen_minus_sign",
    "gen_real_vector_search",
    "gen_unnormalized_minus",
    "haar_unit_vector",
    "load_instance",
    "pairwise_distance_report",
    "verify_answer",
]

logger = logging.getLogger(__name__)

MINUS_SIGN = "minus-sign"
REAL_SEARCH = "real-search"
UNNORMALIZED_MINUS = "unnormalized-minus"

# 2^24 complex entries per vector is the default materialization ceiling.
DEFAULT_DENSE_BUDGET_N = 24

_MANIFEST_NAME = "manifest.txt"


@dataclass(frozen=True)
class HaarSample:
    """A unit vector drawn uniformly from the real or complex sphere."""

    vector: np.ndarray
    field: str  # "real" or "complex"


def haar_unit_vector(d: int, field: str, rng: np.random.Generator) -> HaarSample:
    """Uniform unit vector via normalized Gaussians.

    Rotation invariance of the Gaussian makes the normalized draw exactly
    uniform on the sphere. Real samples are stored with imaginary parts that
    are exact zeros.
    """
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if field == "real":
        g = rng.standard_normal(d).astype(np.complex128)
    elif field == "complex":
        g = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    else:
        raise ValueError(f"unknown field {field!r}")
    nrm = np.linalg.norm(g)
    if nrm == 0.0:  # probability zero, but fail loudly rather than divide
        raise RuntimeError("degenerate Gaussian draw")
    return HaarSample(vector=g / nrm, field=field)


class ProblemInstance:
    """C oracle handles with a hidden distinguished index k* in {1, ..., C}."""

    __slots__ = ("kind", "n", "num_vectors", "seed", "handles", "_k_star")

    def __init__(self, kind: str, n: int, seed: int, handles: tuple[SqHandle, ...], k_star: int):
        if kind not in (MINUS_SIGN, REAL_SEARCH, UNNORMALIZED_MINUS):
            raise ValueError(f"unknown instance kind {kind!r}")
        if len(handles) < 2:
            raise ValueError("an instance needs at least two vectors")
        if not 1 <= k_star <= len(handles):
            raise ValueError("k* out of range")
        self.kind = kind
        self.n = n
        self.num_vectors = len(handles)
        self.seed = seed
        self.handles = tuple(handles)
        self._k_star = k_star

    def verify_answer(self, k: int) -> bool:
        """True iff k is the distinguished index. Does not mutate the instance."""
        if not 1 <= k <= self.num_vectors:
            raise ValueError(f"answer {k} out of range [1, {self.num_vectors}]")
        return k == self._k_star

    def __repr__(self) -> str:  # never leaks k*
        return (
            f"ProblemInstance(kind={self.kind!r}, n={self.n}, "
            f"C={self.num_vectors}, seed={self.seed})"
        )


def verify_answer(instance: ProblemInstance, k: int) -> bool:
    return instance.verify_answer(k)


def _stream(seed: int, *key: int) -> np.random.Generator:
    """Deterministic child generator keyed by (seed, *key)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


def _draw_k_star(seed: int, num_vectors: int) -> int:
    return int(_stream(seed, 0).integers(1, num_vectors + 1))


def gen_minus_sign(n: int, num_vectors: int, seed: int) -> ProblemInstance:
    """Normalized instance: k* is (-1/sqrt(d), 1/sqrt(d), ...), others all-plus."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if num_vectors < 2:
        raise ValueError("need at least two vectors")
    k_star = _draw_k_star(seed, num_vectors)
    scale = 1.0 / math.sqrt(1 << n)
    handles = tuple(
        build_implicit(
            ImplicitVector(kind=KIND_MINUS_AT_INDEX, n=n, scale=scale, minus_index=1)
            if j == k_star
            else ImplicitVector(kind=KIND_ALL_PLUS, n=n, scale=scale)
        )
        for j in range(1, num_vectors + 1)
    )
    return ProblemInstance(MINUS_SIGN, n, seed, handles, k_star)


def gen_unnormalized_minus(n: int, num_vectors: int, seed: int) -> ProblemInstance:
    """Same layout as the normalized family but with entries +-1 (norm sqrt(d))."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if num_vectors < 2:
        raise ValueError("need at least two vectors")
    k_star = _draw_k_star(seed, num_vectors)
    handles = tuple(
        build_implicit(
            ImplicitVector(kind=KIND_MINUS_AT_INDEX, n=n, scale=1.0, minus_index=1)
            if j == k_star
            else ImplicitVector(kind=KIND_ALL_PLUS, n=n, scale=1.0)
        )
        for j in range(1, num_vectors + 1)
    )
    return ProblemInstance(UNNORMALIZED_MINUS, n, seed, handles, k_star)


def gen_real_vector_search(
    n: int,
    num_vectors: int,
    seed: int,
    max_dense_n: int = DEFAULT_DENSE_BUDGET_N,
) -> ProblemInstance:
    """Haar instance: vector k* uniform on the real sphere, the rest complex."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > max_dense_n:
        raise ValueError(f"n={n} exceeds the dense materialization budget ({max_dense_n})")
    if num_vectors < 2:
        raise ValueError("need at least two vectors")
    k_star = _draw_k_star(seed, num_vectors)
    d = 1 << n
    handles = []
    for j in range(1, num_vectors + 1):
        field = "real" if j == k_star else "complex"
        sample = haar_unit_vector(d, field, _stream(seed, 1, j))
        handles.append(build_dense(sample.vector))
    return ProblemInstance(REAL_SEARCH, n, seed, tuple(handles), k_star)


_GENERATORS = {
    MINUS_SIGN: gen_minus_sign,
    REAL_SEARCH: gen_real_vector_search,
    UNNORMALIZED_MINUS: gen_unnormalized_minus,
}


def pairwise_distance_report(instance: ProblemInstance) -> list[float]:
    """All C(C-1)/2 Euclidean distances between the instance's vectors.

    Requires dense backings; for implicit families the distance has a closed
    form (only one component differs) and materializing 2^n entries to
    recompute it would defeat the point of the implicit representation.
    """
    vectors = []
    for handle in instance.handles:
        if isinstance(handle.backing, ImplicitVector):
            raise ValueError(
                "pairwise distances need dense backings; use the closed form "
                "2*scale for implicit minus-sign pairs"
            )
        vectors.append(handle.backing.entries)
    out = []
    for a in range(len(vectors)):
        for b in range(a + 1, len(vectors)):
            out.append(float(np.linalg.norm(vectors[a] - vectors[b])))
    return out


def _implicit_descriptor(vec: ImplicitVector) -> str:
    parts = [vec.kind, f"n={vec.n}", f"scale={vec.scale:.17g}"]
    if vec.minus_index is not None:
        parts.append(f"minus_index={vec.minus_index}")
    if vec.sign_mask is not None:
        parts.append(f"sign_mask={vec.sign_mask}")
    return " ".join(parts)


def _parse_implicit_descriptor(tokens: list[str]) -> ImplicitVector:
    kind = tokens[0]
    kwargs: dict = {}
    for tok in tokens[1:]:
        key, _, value = tok.partition("=")
        if key == "n":
            kwargs["n"] = int(value)
        elif key == "scale":
            kwargs["scale"] = float(value)
        elif key == "minus_index":
            kwargs["minus_index"] = int(value)
        elif key == "sign_mask":
            kwargs["sign_mask"] = int(value)
        else:
            raise ValueError(f"unknown implicit field {key!r}")
    return ImplicitVector(kind=kind, **kwargs)


def dump_instance(instance: ProblemInstance, directory: str | Path, reveal: bool = False) -> None:
    """Write an instance to a directory: manifest plus one file per dense vector.

    Implicit backings are recorded as closed-form descriptors in the manifest
    (their 2^n entries are never materialized). The answer index is written
    only when `reveal` is set, so scripted solvers cannot read it; loaders
    recover it deterministically from the recorded seed instead.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lines = [
        f"kind {instance.kind}",
        f"n {instance.n}",
        f"C {instance.num_vectors}",
        f"seed {instance.seed}",
    ]
    for j, handle in enumerate(instance.handles, start=1):
        if isinstance(handle.backing, ImplicitVector):
            lines.append(f"vector {j} implicit {_implicit_descriptor(handle.backing)}")
        else:
            fname = f"vector_{j}.txt"
            save_dense_vector(directory / fname, handle.backing.entries)
            lines.append(f"vector {j} dense {fname}")
    if reveal:
        lines.append(f"k_star {instance._k_star}")
    (directory / _MANIFEST_NAME).write_text("\n".join(lines) + "\n")


def load_instance(directory: str | Path) -> ProblemInstance:
    """Rebuild an instance from a dumped directory.

    When the manifest does not reveal k*, the instance is regenerated from
    its (kind, n, C, seed) record to recover the answer, and the dumped data
    is checked against the regeneration so tampered dumps are rejected.
    """
    directory = Path(directory)
    manifest = directory / _MANIFEST_NAME
    kind = None
    n = None
    num_vectors = None
    seed = None
    k_star = None
    vector_specs: dict[int, tuple[str, list[str]]] = {}
    for lineno, raw in enumerate(manifest.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        key = tokens[0]
        if key == "kind":
            kind = tokens[1]
        elif key == "n":
            n = int(tokens[1])
        elif key == "C":
            num_vectors = int(tokens[1])
        elif key == "seed":
            seed = int(tokens[1])
        elif key == "k_star":
            k_star = int(tokens[1])
        elif key == "vector":
            vector_specs[int(tokens[1])] = (tokens[2], tokens[3:])
        else:
            raise ValueError(f"{manifest}:{lineno}: unknown manifest key {key!r}")
    if kind is None or n is None or num_vectors is None or seed is None:
        raise ValueError(f"{manifest}: incomplete manifest")
    if sorted(vector_specs) != list(range(1, num_vectors + 1)):
        raise ValueError(f"{manifest}: expected vectors 1..{num_vectors}")

    handles = []
    for j in range(1, num_vectors + 1):
        backing_kind, rest = vector_specs[j]
        if backing_kind == "dense":
            handles.append(build_dense(load_dense_vector(directory / rest[0])))
        elif backing_kind == "implicit":
            handles.append(build_implicit(_parse_implicit_descriptor(rest)))
        else:
            raise ValueError(f"{manifest}: unknown backing {backing_kind!r}")

    if k_star is None:
        regenerated = _GENERATORS[kind](n, num_vectors, seed)
        for loaded, regen in zip(handles, regenerated.handles):
            if isinstance(loaded.backing, ImplicitVector):
                if loaded.backing != regen.backing:
                    raise ValueError("dumped instance does not match its seed")
            else:
                if not np.array_equal(loaded.backing.entries, materialize(regen)):
                    raise ValueError("dumped instance does not match its seed")
        k_star = regenerated._k_star
    return ProblemInstance(kind, n, seed, tuple(handles), k_star)
