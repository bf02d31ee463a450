"""Composite qubit ⊗ truncated Fock space: states, operators, expectations.

Basis ordering is qubit-major and fixed everywhere in the package:
index = q * (n_max + 1) + n with q ∈ {0 = ground, 1 = excited} and
n ∈ {0, ..., n_max}. S_z has eigenvalues -1/2 (ground) and +1/2 (excited),
and a|n⟩ = √n |n-1⟩.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    NonHermitianObservable,
    NonPositiveCutoff,
)

HERMITICITY_TOL = 1e-12
DENSITY_HERMITICITY_TOL = 1e-10
DENSITY_TRACE_TOL = 1e-8
DENSITY_EIGENVALUE_TOL = 1e-8
NORM_TOL = 1e-8
IMAG_RESIDUE_HARD = 1e-8

OPERATOR_KINDS = (
    "a",
    "a_dag",
    "number",
    "s_z",
    "sigma_x",
    "sigma_plus",
    "sigma_minus",
    "identity",
    "cutoff_projector",
)

# kinds whose matrix is hermitian by construction
_HERMITIAN_KINDS = frozenset(
    {"number", "s_z", "sigma_x", "identity", "cutoff_projector"}
)


@dataclass(frozen=True)
class HilbertSpace:
    """Descriptor of the composite qubit ⊗ Fock space."""

    fock_cutoff: int
    qubit_dim: int = 2

    def __post_init__(self):
        if self.fock_cutoff < 1:
            raise NonPositiveCutoff(
                f"fock_cutoff must be >= 1, got {self.fock_cutoff}"
            )

    @property
    def fock_dim(self) -> int:
        return self.fock_cutoff + 1

    @property
    def total_dim(self) -> int:
        return self.qubit_dim * (self.fock_cutoff + 1)

    def index(self, qubit: int, n: int) -> int:
        """Flat index of the basis state |qubit, n⟩ (qubit-major)."""
        if qubit not in (0, 1):
            raise ValueError(f"qubit label must be 0 or 1, got {qubit}")
        if not 0 <= n <= self.fock_cutoff:
            raise ValueError(f"photon number {n} outside 0..{self.fock_cutoff}")
        return qubit * self.fock_dim + n

    def labels(self):
        """(qubit, n) pairs in basis order."""
        return [(q, n) for q in range(2) for n in range(self.fock_dim)]


def make_space(fock_cutoff: int) -> HilbertSpace:
    """Build the composite space with Fock states |0⟩..|fock_cutoff⟩."""
    return HilbertSpace(fock_cutoff=int(fock_cutoff))


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense complex operator on a composite space.

    ``hermitian`` is a builder-provided flag; when set, hermiticity is
    verified elementwise at construction.
    """

    space: HilbertSpace
    matrix: np.ndarray
    hermitian: bool = False
    label: str | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        object.__setattr__(self, "matrix", m)
        d = self.space.total_dim
        if m.shape != (d, d):
            raise DimensionMismatch(
                f"operator shape {m.shape} does not match total_dim {d}"
            )
        if self.hermitian:
            dev = np.max(np.abs(m - m.conj().T))
            if dev > HERMITICITY_TOL:
                raise NonHermitianObservable(
                    f"operator flagged hermitian deviates by {dev:.2e}"
                )

    def dag(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T, self.hermitian)

    def __matmul__(self, other: "Operator") -> "Operator":
        if self.space != other.space:
            raise DimensionMismatch("operator product across different spaces")
        return Operator(self.space, self.matrix @ other.matrix)

    def __add__(self, other: "Operator") -> "Operator":
        if self.space != other.space:
            raise DimensionMismatch("operator sum across different spaces")
        return Operator(self.space, self.matrix + other.matrix)

    def __rmul__(self, scalar) -> "Operator":
        return Operator(self.space, complex(scalar) * self.matrix)


def _fock_annihilator(fock_dim: int) -> np.ndarray:
    a = np.zeros((fock_dim, fock_dim), dtype=np.complex128)
    for n in range(1, fock_dim):
        a[n - 1, n] = np.sqrt(n)
    return a


def build_operator(space: HilbertSpace, kind: str) -> Operator:
    """Construct one of the standard operators on the composite space.

    Qubit operators are tensored with the field identity and vice versa,
    in qubit-major ordering (composite = kron(qubit_op, field_op)).
    """
    if kind not in OPERATOR_KINDS:
        raise ValueError(f"unknown operator kind {kind!r}; one of {OPERATOR_KINDS}")
    nf = space.fock_dim
    i2 = np.eye(2, dtype=np.complex128)
    ifield = np.eye(nf, dtype=np.complex128)
    a = _fock_annihilator(nf)

    sigma_plus = np.zeros((2, 2), dtype=np.complex128)
    sigma_plus[1, 0] = 1.0  # |e⟩⟨g|
    sigma_minus = sigma_plus.conj().T

    if kind == "a":
        m = np.kron(i2, a)
    elif kind == "a_dag":
        m = np.kron(i2, a.conj().T)
    elif kind == "number":
        m = np.kron(i2, a.conj().T @ a)
    elif kind == "s_z":
        m = np.kron(np.diag([-0.5, 0.5]).astype(np.complex128), ifield)
    elif kind == "sigma_x":
        m = np.kron(sigma_plus + sigma_minus, ifield)
    elif kind == "sigma_plus":
        m = np.kron(sigma_plus, ifield)
    elif kind == "sigma_minus":
        m = np.kron(sigma_minus, ifield)
    elif kind == "identity":
        m = np.kron(i2, ifield)
    else:  # cutoff_projector: I₂ ⊗ |n_max⟩⟨n_max|
        proj = np.zeros((nf, nf), dtype=np.complex128)
        proj[nf - 1, nf - 1] = 1.0
        m = np.kron(i2, proj)

    return Operator(space, m, hermitian=kind in _HERMITIAN_KINDS, label=kind)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state on the composite space."""

    space: HilbertSpace
    amplitudes: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (self.space.total_dim,):
            raise DimensionMismatch(
                f"state length {amps.shape} does not match total_dim "
                f"{self.space.total_dim}"
            )
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise ValueError("state vector contains non-finite entries")
        if self.normalized:
            drift = abs(np.linalg.norm(amps) - 1.0)
            if drift > NORM_TOL:
                raise ValueError(f"state marked normalized but norm drifts {drift:.2e}")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, qubit: int, n: int) -> complex:
        return complex(self.amplitudes[self.space.index(qubit, n)])

    def to_json_pairs(self) -> list:
        """Amplitudes as [re, im] pairs in qubit-major basis order."""
        return [[float(c.real), float(c.imag)] for c in self.amplitudes]

    @classmethod
    def from_json_pairs(cls, space: HilbertSpace, pairs, normalized=True):
        amps = np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)
        return cls(space, amps, normalized=normalized)


def basis_state(space: HilbertSpace, qubit: int, n: int) -> StateVector:
    """|qubit, n⟩ basis vector."""
    amps = np.zeros(space.total_dim, dtype=np.complex128)
    amps[space.index(qubit, n)] = 1.0
    return StateVector(space, amps)


def ground_state(space: HilbertSpace) -> StateVector:
    """|g, 0⟩: qubit ground, field vacuum."""
    return basis_state(space, 0, 0)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Mixed state on the composite space.

    Validates hermiticity (1e-10), unit trace (1e-8) and positivity
    (eigenvalues ≥ -1e-8) at construction.
    """

    space: HilbertSpace
    matrix: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        object.__setattr__(self, "matrix", m)
        d = self.space.total_dim
        if m.shape != (d, d):
            raise DimensionMismatch(
                f"density matrix shape {m.shape} does not match total_dim {d}"
            )
        if self.validate:
            herm_dev = np.max(np.abs(m - m.conj().T))
            if herm_dev > DENSITY_HERMITICITY_TOL:
                raise ValueError(f"density matrix hermiticity deviates {herm_dev:.2e}")
            tr_dev = abs(np.trace(m).real - 1.0) + abs(np.trace(m).imag)
            if tr_dev > DENSITY_TRACE_TOL:
                raise ValueError(f"density matrix trace deviates {tr_dev:.2e}")
            w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
            if w.min() < -DENSITY_EIGENVALUE_TOL:
                raise ValueError(f"density matrix eigenvalue {w.min():.2e} < 0")

    @classmethod
    def from_state(cls, psi: StateVector) -> "DensityMatrix":
        v = psi.amplitudes
        return cls(psi.space, np.outer(v, v.conj()))

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))


def expectation(state, op: Operator) -> float:
    """⟨ψ|O|ψ⟩ for a StateVector or Tr[ρO] for a DensityMatrix.

    Requires the operator to be flagged hermitian; the imaginary residue
    is checked against 1e-8 and then discarded.
    """
    if not op.hermitian:
        raise NonHermitianObservable(
            "expectation requires an operator flagged hermitian"
        )
    if state.space != op.space:
        raise DimensionMismatch("state and operator live on different spaces")
    if isinstance(state, StateVector):
        val = np.vdot(state.amplitudes, op.matrix @ state.amplitudes)
    elif isinstance(state, DensityMatrix):
        val = np.trace(op.matrix @ state.matrix)
    else:
        raise TypeError(f"expected StateVector or DensityMatrix, got {type(state)}")
    val = complex(val)
    if abs(val.imag) > IMAG_RESIDUE_HARD:
        raise NonHermitianObservable(
            f"imaginary residue {val.imag:.2e} exceeds {IMAG_RESIDUE_HARD}"
        )
    return float(val.real)
