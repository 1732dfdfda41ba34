"""Dense state-vector simulator for up to 8 qubits with post-selection.

Qubit 0 is the leftmost ket symbol: basis index bit k (counting from the
most significant of n bits) belongs to qubit k.  Gates are limited to X, Z,
H, RY(theta) and CNOT; states are immutable (every operation returns a new
state) and kept normalized to within 1e-12.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MAX_QUBITS = 8
_NORM_TOL = 1e-12


class IndexOutOfRange(ValueError):
    pass


class ZeroProbabilityBranch(ValueError):
    """Post-selection on an outcome whose probability is numerically zero."""


@dataclass(frozen=True)
class Gate:
    kind: str  # X | Z | H | RY | CNOT
    target: int
    control: int | None = None
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in ("X", "Z", "H", "RY", "CNOT"):
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind == "RY" and self.theta is None:
            raise ValueError("RY requires an angle")
        if self.kind == "CNOT":
            if self.control is None:
                raise ValueError("CNOT requires a control qubit")
            if self.control == self.target:
                raise ValueError("CNOT control and target must differ")


def X(q: int) -> Gate:
    return Gate("X", q)


def Z(q: int) -> Gate:
    return Gate("Z", q)


def H(q: int) -> Gate:
    return Gate("H", q)


def RY(q: int, theta: float) -> Gate:
    return Gate("RY", q, theta=theta)


def CNOT(control: int, target: int) -> Gate:
    return Gate("CNOT", target, control=control)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be 1..{MAX_QUBITS}")
        for g in self.gates:
            for q in (g.target, g.control):
                if q is not None and not 0 <= q < self.n_qubits:
                    raise IndexOutOfRange(f"qubit {q} out of range for {self.n_qubits} qubits")


@dataclass(frozen=True)
class QuantumState:
    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError(f"expected {1 << self.n_qubits} amplitudes, got {amps.shape}")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"state norm {norm} is not 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @staticmethod
    def basis(n_qubits: int, bits: int | str) -> "QuantumState":
        """Computational basis state; a string like '010' reads qubit 0 first."""
        if isinstance(bits, str):
            bits = int(bits, 2)
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[bits] = 1.0
        return QuantumState(n_qubits, amps)

    def amplitude(self, bits: int | str) -> complex:
        if isinstance(bits, str):
            bits = int(bits, 2)
        return complex(self.amplitudes[bits])


_H_MAT = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_X_MAT = np.array([[0, 1], [1, 0]], dtype=complex)
_Z_MAT = np.array([[1, 0], [0, -1]], dtype=complex)


def _ry_mat(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _apply_1q(amps: np.ndarray, mat: np.ndarray, qubit: int, n: int) -> np.ndarray:
    t = amps.reshape([2] * n)
    t = np.tensordot(mat, t, axes=([1], [qubit]))
    # tensordot moved the qubit axis to the front
    t = np.moveaxis(t, 0, qubit)
    return np.ascontiguousarray(t).reshape(-1)


def apply(state: QuantumState, gate: Gate) -> QuantumState:
    n = state.n_qubits
    for q in (gate.target, gate.control):
        if q is not None and not 0 <= q < n:
            raise IndexOutOfRange(f"qubit {q} out of range for {n} qubits")
    amps = state.amplitudes
    if gate.kind == "X":
        out = _apply_1q(amps, _X_MAT, gate.target, n)
    elif gate.kind == "Z":
        out = _apply_1q(amps, _Z_MAT, gate.target, n)
    elif gate.kind == "H":
        out = _apply_1q(amps, _H_MAT, gate.target, n)
    elif gate.kind == "RY":
        out = _apply_1q(amps, _ry_mat(gate.theta), gate.target, n)
    else:  # CNOT
        t = amps.reshape([2] * n).copy()
        idx1 = [slice(None)] * n
        idx1[gate.control] = 1
        sub = t[tuple(idx1)]
        t[tuple(idx1)] = np.flip(sub, axis=_axis_after_fixing(gate.target, gate.control))
        out = t.reshape(-1)
    return QuantumState(n, out)


def _axis_after_fixing(target: int, control: int) -> int:
    # fixing the control axis removes it, shifting later axes left by one
    return target - 1 if target > control else target


def run(circuit: Circuit, initial: QuantumState | int | str = 0) -> QuantumState:
    if not isinstance(initial, QuantumState):
        initial = QuantumState.basis(circuit.n_qubits, initial)
    if initial.n_qubits != circuit.n_qubits:
        raise ValueError("initial state size does not match circuit")
    state = initial
    for gate in circuit.gates:
        state = apply(state, gate)
    return state


def measure_prob(state: QuantumState, qubit: int, outcome: int) -> float:
    if not 0 <= qubit < state.n_qubits:
        raise IndexOutOfRange(f"qubit {qubit} out of range")
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    t = np.abs(state.amplitudes.reshape([2] * state.n_qubits)) ** 2
    axes = tuple(i for i in range(state.n_qubits) if i != qubit)
    return float(t.sum(axis=axes)[outcome])


def post_select(state: QuantumState, qubit: int, outcome: int) -> QuantumState:
    """Condition on a measurement outcome: zero the other branch, renormalize."""
    p = measure_prob(state, qubit, outcome)
    if p <= _NORM_TOL:
        raise ZeroProbabilityBranch(f"outcome {outcome} on qubit {qubit} has probability {p}")
    t = state.amplitudes.reshape([2] * state.n_qubits).copy()
    idx = [slice(None)] * state.n_qubits
    idx[qubit] = 1 - outcome
    t[tuple(idx)] = 0.0
    return QuantumState(state.n_qubits, (t / math.sqrt(p)).reshape(-1))


def factor_out(state: QuantumState, qubit: int) -> QuantumState:
    """Drop a qubit that is in a definite basis state (e.g. after post_select)."""
    p0 = measure_prob(state, qubit, 0)
    if min(p0, 1 - p0) > _NORM_TOL:
        raise ValueError(f"qubit {qubit} is not in a basis state (p0={p0})")
    outcome = 0 if p0 > 0.5 else 1
    t = state.amplitudes.reshape([2] * state.n_qubits)
    idx = [slice(None)] * state.n_qubits
    idx[qubit] = outcome
    sub = t[tuple(idx)].reshape(-1)
    sub = sub / math.sqrt(float(np.sum(np.abs(sub) ** 2)))
    return QuantumState(state.n_qubits - 1, sub)


def schmidt_values(state: QuantumState, partition) -> np.ndarray:
    """Singular values of the amplitude matrix across the given qubit subset."""
    left = sorted(set(partition))
    n = state.n_qubits
    if not left or len(left) >= n:
        raise ValueError("partition must be a proper nonempty qubit subset")
    if any(q < 0 or q >= n for q in left):
        raise IndexOutOfRange(f"partition {left} out of range")
    right = [q for q in range(n) if q not in left]
    t = state.amplitudes.reshape([2] * n)
    t = np.transpose(t, left + right)
    mat = t.reshape(1 << len(left), 1 << len(right))
    return np.linalg.svd(mat, compute_uv=False)


def is_product_state(state: QuantumState, partition, threshold: float = 1e-9) -> tuple[bool, np.ndarray]:
    """Numerical Schmidt-rank-1 test across the partition.

    Returns (separable?, singular values); the state is a product across the
    cut iff the second singular value is below the threshold.
    """
    sv = schmidt_values(state, partition)
    return bool(sv[1] < threshold) if len(sv) > 1 else True, sv


# ---------------------------------------------------------------------------
# circuits for the three experiments

def build_reversed_cnot_circuit() -> Circuit:
    """Hadamard sandwich turning CNOT(0->1) into CNOT(1->0)."""
    return Circuit(2, (H(0), H(1), CNOT(0, 1), H(0), H(1)))


def build_ghz_circuit() -> Circuit:
    return Circuit(3, (H(0), CNOT(0, 1), CNOT(0, 2)))


W_THETA = 2 * math.acos(1 / math.sqrt(3))


def build_w_circuit() -> Circuit:
    """Three-qubit circuit preparing (|001> + |010> + |100>)/sqrt(3).

    The controlled rotation splitting the second branch is decomposed into
    RY halves around CNOTs, so only the five primitive gate kinds appear.
    """
    quarter = math.pi / 4
    return Circuit(
        3,
        (
            RY(0, W_THETA),
            # controlled-RY(pi/2) from qubit 0 onto qubit 1
            RY(1, quarter),
            CNOT(0, 1),
            RY(1, -quarter),
            CNOT(0, 1),
            CNOT(1, 2),
            CNOT(0, 1),
            X(0),
        ),
    )


def ghz_state() -> QuantumState:
    return run(build_ghz_circuit())


def w_state() -> QuantumState:
    return run(build_w_circuit())


def plus_post_select(state: QuantumState, qubit: int) -> QuantumState:
    """Select the |+> outcome: Hadamard before measuring, then keep outcome 0."""
    return post_select(apply(state, H(qubit)), qubit, 0)


def bell_phi_plus() -> np.ndarray:
    return np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)


def bell_phi_minus() -> np.ndarray:
    return np.array([1, 0, 0, -1], dtype=complex) / math.sqrt(2)
