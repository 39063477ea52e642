"""Small statevector circuits: the ancilla-probability state construction and
the product-versus-amplitude encoding contrast.

For a circuit U on n qubits, the (n+1)-qubit state built by conjugating a
CNOT with U places the probability of measuring 0 on U's first qubit into
its leading amplitude. Querying that single amplitude through an SQ oracle
therefore amounts to strong simulation of the circuit, which is why cheap SQ
access to circuit-generated states cannot exist in general.

Bit order: the first listed qubit (index 0 in circuit files) is the most
significant bit of the basis index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quantum_sim import Statevector
from .sq_oracle import SqHandle, build_dense

__all__ = [
    "Circuit",
    "EncodedVector",
    "Gate",
    "MAX_QUBITS",
    "amplitude_single_copy_success",
    "build_psi_u",
    "p_zero_first_qubit",
    "parse_circuit",
    "product_encode_all_plus",
    "product_encode_sign_vector",
    "product_state_amplitudes",
    "random_circuit",
    "run_statevector",
    "solve_product_encoding",
    "sq_from_state",
]

MAX_QUBITS = 20

_SQRT_HALF = 1.0 / math.sqrt(2.0)
_GATE_MATRICES: dict[str, np.ndarray] = {
    "H": np.array([[1, 1], [1, -1]], dtype=np.complex128) * _SQRT_HALF,
    "T": np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=np.complex128),
    "S": np.array([[1, 0], [0, 1j]], dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}
GATE_NAMES = tuple(_GATE_MATRICES) + ("CNOT",)


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]


@dataclass(frozen=True)
class Circuit:
    """Gate list over n qubits, restricted to {H, T, S, X, Z, CNOT}."""

    n: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("qubit count must be nonnegative")
        for gate in self.gates:
            if gate.name not in GATE_NAMES:
                raise ValueError(f"unknown gate {gate.name!r}")
            for q in gate.qubits:
                if not 0 <= q < self.n:
                    raise ValueError(f"qubit {q} out of range for {self.n} qubits")
            if gate.name == "CNOT" and gate.qubits[0] == gate.qubits[1]:
                raise ValueError("CNOT control equals target")


def parse_circuit(text: str) -> Circuit:
    """Parse the circuit text format.

    First content line is `qubits <n>`; gate lines follow, one per line:
    `H <q>` / `T <q>` / `S <q>` / `X <q>` / `Z <q>` / `CNOT <c> <t>`.
    Lines starting with `#` are comments. Empty input yields the trivial
    identity circuit on zero qubits.
    """
    n = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if n is None:
            if tokens[0] != "qubits" or len(tokens) != 2:
                raise ValueError(f"line {lineno}: expected `qubits <n>`, got {line!r}")
            try:
                n = int(tokens[1])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: bad qubit count {tokens[1]!r}") from exc
            if n < 0:
                raise ValueError(f"line {lineno}: negative qubit count")
            continue
        name = tokens[0]
        if name not in GATE_NAMES:
            raise ValueError(f"line {lineno}: unknown gate {name!r}")
        want = 2 if name == "CNOT" else 1
        if len(tokens) != want + 1:
            raise ValueError(f"line {lineno}: {name} takes {want} qubit argument(s)")
        try:
            qubits = tuple(int(t) for t in tokens[1:])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad qubit index in {line!r}") from exc
        for q in qubits:
            if not 0 <= q < n:
                raise ValueError(f"line {lineno}: qubit {q} out of range [0, {n - 1}]")
        if name == "CNOT" and qubits[0] == qubits[1]:
            raise ValueError(f"line {lineno}: CNOT control equals target")
        gates.append(Gate(name, qubits))
    if n is None:
        return Circuit(n=0, gates=())
    return Circuit(n=n, gates=tuple(gates))


def _apply_single(state: np.ndarray, matrix: np.ndarray, q: int, n: int) -> np.ndarray:
    tensor = state.reshape([2] * n)
    tensor = np.moveaxis(np.tensordot(matrix, np.moveaxis(tensor, q, 0), axes=(1, 0)), 0, q)
    return np.ascontiguousarray(tensor).reshape(-1)


def _apply_cnot(state: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    tensor = state.reshape([2] * n).copy()
    sel0 = [slice(None)] * n
    sel1 = [slice(None)] * n
    sel0[control] = 1
    sel1[control] = 1
    sel0[target] = 0
    sel1[target] = 1
    a = tensor[tuple(sel0)].copy()
    tensor[tuple(sel0)] = tensor[tuple(sel1)]
    tensor[tuple(sel1)] = a
    return tensor.reshape(-1)


def _run_gates(state: np.ndarray, gates, n: int, dagger: bool = False) -> np.ndarray:
    seq = reversed(gates) if dagger else gates
    for gate in seq:
        if gate.name == "CNOT":
            state = _apply_cnot(state, gate.qubits[0], gate.qubits[1], n)
        else:
            matrix = _GATE_MATRICES[gate.name]
            if dagger:
                matrix = matrix.conj().T
            state = _apply_single(state, matrix, gate.qubits[0], n)
    return state


def run_statevector(circuit: Circuit) -> Statevector:
    """U applied to the all-zeros state, to double precision."""
    if circuit.n > MAX_QUBITS:
        raise ValueError(f"{circuit.n} qubits exceed the budget of {MAX_QUBITS}")
    state = np.zeros(1 << circuit.n, dtype=np.complex128)
    state[0] = 1.0
    state = _run_gates(state, circuit.gates, circuit.n)
    return Statevector(amplitudes=state, n=circuit.n)


def build_psi_u(circuit: Circuit) -> Statevector:
    """The (n+1)-qubit probe state (I (x) U^dag) CNOT (I (x) U) |0^(n+1)>.

    Qubit 0 is the fresh ancilla; U acts on qubits 1..n and the CNOT is
    controlled by qubit 1 (U's first qubit) targeting the ancilla. The
    leading amplitude of the result equals the probability of outcome 0 when
    measuring the first qubit of U|0^n>.
    """
    n = circuit.n
    if n + 1 > MAX_QUBITS:
        raise ValueError(f"{n + 1} qubits exceed the budget of {MAX_QUBITS}")
    if n == 0:
        raise ValueError("the probe construction needs at least one circuit qubit")
    m = n + 1
    shifted = tuple(Gate(g.name, tuple(q + 1 for q in g.qubits)) for g in circuit.gates)
    state = np.zeros(1 << m, dtype=np.complex128)
    state[0] = 1.0
    state = _run_gates(state, shifted, m)
    state = _apply_cnot(state, control=1, target=0, n=m)
    state = _run_gates(state, shifted, m, dagger=True)
    return Statevector(amplitudes=state, n=m)


def p_zero_first_qubit(circuit: Circuit) -> float:
    """Probability of outcome 0 when measuring qubit 0 of U|0^n>."""
    if circuit.n == 0:
        return 1.0
    state = run_statevector(circuit).amplitudes
    half = state.size // 2
    return float(np.sum(np.abs(state[:half]) ** 2))


def sq_from_state(state: Statevector) -> SqHandle:
    """Dense SQ handle over the state's amplitudes (QueryN is 1 by unitarity)."""
    return build_dense(state.amplitudes)


def random_circuit(n: int, depth: int, rng: np.random.Generator) -> Circuit:
    """Uniformly random gate sequence, for identity-check sweeps."""
    if n < 1:
        raise ValueError("need at least one qubit")
    gates = []
    for _ in range(depth):
        name = GATE_NAMES[int(rng.integers(len(GATE_NAMES)))]
        if name == "CNOT":
            if n < 2:
                name = "X"
            else:
                control = int(rng.integers(n))
                target = int(rng.integers(n - 1))
                if target >= control:
                    target += 1
                gates.append(Gate("CNOT", (control, target)))
                continue
        gates.append(Gate(name, (int(rng.integers(n)),)))
    return Circuit(n=n, gates=tuple(gates))


@dataclass(frozen=True)
class EncodedVector:
    """A sign vector stored either as amplitudes or as a product of |+>/|-> factors."""

    mode: str  # "amplitude" or "product"
    statevector: Statevector | None = None
    factors: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.mode == "amplitude":
            if self.statevector is None:
                raise ValueError("amplitude mode needs a statevector")
        elif self.mode == "product":
            if not self.factors or any(f not in ("+", "-") for f in self.factors):
                raise ValueError("product mode needs factors over {+, -}")
        else:
            raise ValueError(f"unknown mode {self.mode!r}")


def product_encode_sign_vector(n: int) -> EncodedVector:
    """The distinguished object: |-> on the first qubit, |+> on the rest."""
    if n < 1:
        raise ValueError("need at least one qubit")
    return EncodedVector(mode="product", factors=("-",) + ("+",) * (n - 1))


def product_encode_all_plus(n: int) -> EncodedVector:
    """The background object: |+> on every qubit."""
    if n < 1:
        raise ValueError("need at least one qubit")
    return EncodedVector(mode="product", factors=("+",) * n)


def product_state_amplitudes(factors: tuple[str, ...]) -> np.ndarray:
    """Amplitudes of the product state, first factor most significant."""
    amps = np.ones(1, dtype=np.complex128)
    plus = np.array([_SQRT_HALF, _SQRT_HALF], dtype=np.complex128)
    minus = np.array([_SQRT_HALF, -_SQRT_HALF], dtype=np.complex128)
    for f in factors:
        amps = np.kron(amps, plus if f == "+" else minus)
    return amps


def solve_product_encoding(encoded: list[EncodedVector]) -> int:
    """Measure the first qubit of each object once in the {|+>, |->} basis.

    Product factors are exactly |+> or |->, so the Born probability of the
    minus outcome is 0 or 1 and one copy per object decides deterministically.
    Returns the 1-based index of the object that yields the minus outcome.
    """
    hits = []
    for k, enc in enumerate(encoded, start=1):
        if enc.mode != "product":
            raise ValueError("this solver reads product encodings only")
        if enc.factors[0] == "-":
            hits.append(k)
    if len(hits) != 1:
        raise ValueError(f"expected exactly one minus-encoded object, found {len(hits)}")
    return hits[0]


def amplitude_single_copy_success(n: int) -> float:
    """Optimal one-copy success probability for the amplitude-encoded pair.

    The two amplitude-encoded states have overlap 1 - 2/d with d = 2^n, so
    the optimal measurement succeeds with 1/2 + sqrt(1 - (1-2/d)^2)/2, which
    decreases toward 1/2 as n grows. Contrast with the product encoding,
    where one copy succeeds with certainty.
    """
    if n < 1:
        raise ValueError("need at least one qubit")
    overlap = 1.0 - 2.0 / float(1 << n)
    return 0.5 + 0.5 * math.sqrt(max(0.0, 1.0 - overlap**2))
