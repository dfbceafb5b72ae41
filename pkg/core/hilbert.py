from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Literal, Sequence, Tuple, Union

import numpy as np

from config.settings import settings
from config.tolerances import TOLERANCES
from core.errors import EmptySectorError, HermiticityError, LabError

logger = logging.getLogger(__name__)

Axis = Literal["x", "y", "z"]
Sign = Literal["+", "-"]

# u+ = (1, 0), u- = (0, 1); v+- = (1, +-i)/sqrt(2). Particle 1 is the slow Kronecker index.
_BASIS_NAMES = {"z": "u", "y": "v", "x": "w"}


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Ket:
    amplitudes: np.ndarray
    label: str = ""

    def __post_init__(self):
        amplitudes = _frozen(self.amplitudes)
        if amplitudes.ndim != 1 or amplitudes.size == 0:
            raise LabError("Ket amplitudes must be a non-empty 1D array")
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm ** 2 - 1.0) <= TOLERANCES['exact']

    def normalized(self) -> "Ket":
        norm = self.norm
        if norm == 0:
            raise EmptySectorError("Cannot normalize the zero vector")
        return Ket(self.amplitudes / norm, self.label)

    def scaled(self, factor: complex) -> "Ket":
        return Ket(self.amplitudes * factor, self.label)

    def __add__(self, other: "Ket") -> "Ket":
        return Ket(self.amplitudes + other.amplitudes, f"{self.label}+{other.label}")

    def __sub__(self, other: "Ket") -> "Ket":
        return Ket(self.amplitudes - other.amplitudes, f"{self.label}-{other.label}")


@dataclass(frozen=True, eq=False)
class LinOp:
    entries: np.ndarray
    label: str = ""

    def __post_init__(self):
        entries = _frozen(self.entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise LabError("LinOp entries must be a square matrix")
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def is_hermitian(self, tol: float = TOLERANCES['exact']) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tol)

    def __matmul__(self, other: Union["LinOp", Ket]):
        if isinstance(other, Ket):
            return Ket(self.entries @ other.amplitudes, other.label)
        return LinOp(self.entries @ other.entries, f"{self.label}{other.label}")

    def __add__(self, other: "LinOp") -> "LinOp":
        return LinOp(self.entries + other.entries, f"{self.label}+{other.label}")

    def __sub__(self, other: "LinOp") -> "LinOp":
        return LinOp(self.entries - other.entries, f"{self.label}-{other.label}")

    def scaled(self, factor: complex) -> "LinOp":
        return LinOp(self.entries * factor, self.label)


def identity(dim: int) -> LinOp:
    return LinOp(np.eye(dim), "1")


def spin_matrices(hbar: float = None) -> Dict[str, np.ndarray]:
    """Single spin-1/2 component matrices s_k = (hbar/2) sigma_k."""
    hbar = settings.HBAR if hbar is None else hbar
    half = 0.5 * hbar
    return {
        "x": half * np.array([[0, 1], [1, 0]], dtype=complex),
        "y": half * np.array([[0, -1j], [1j, 0]], dtype=complex),
        "z": half * np.array([[1, 0], [0, -1]], dtype=complex),
    }


def spin_operator(axis: Axis, particle: int = None, n_particles: int = 2, hbar: float = None) -> LinOp:
    """Spin component of one particle, embedded in the n-particle product space.

    With ``particle=None`` the bare 2x2 single-spin matrix is returned.
    """
    single = spin_matrices(hbar)[axis]
    if particle is None:
        return LinOp(single, f"s_{axis}")
    if not 1 <= particle <= n_particles:
        raise LabError(f"particle index {particle} outside 1..{n_particles}")
    entries = np.array([[1.0]], dtype=complex)
    for index in range(1, n_particles + 1):
        entries = np.kron(entries, single if index == particle else np.eye(2))
    return LinOp(entries, f"s_{particle}{axis}")


def total_spin(axis: Axis, hbar: float = None) -> LinOp:
    op = spin_operator(axis, 1, hbar=hbar) + spin_operator(axis, 2, hbar=hbar)
    return LinOp(op.entries, f"S_{axis}")


def spin_basis(axis: Axis, sign: Sign, particle: int = None) -> Ket:
    """Normalized eigenvector of s_axis with eigenvalue sign * hbar/2.

    ``particle`` only labels the ket (e.g. ``v+(2)``); its position in a
    product state is fixed by the order of ``tensor`` calls.
    """
    root = 1.0 / np.sqrt(2.0)
    vectors = {
        ("z", "+"): [1.0, 0.0],
        ("z", "-"): [0.0, 1.0],
        ("y", "+"): [root, 1j * root],
        ("y", "-"): [root, -1j * root],
        ("x", "+"): [root, root],
        ("x", "-"): [root, -root],
    }
    if (axis, sign) not in vectors:
        raise LabError(f"Unknown spin basis ({axis}, {sign})")
    label = f"{_BASIS_NAMES[axis]}{sign}"
    if particle is not None:
        label += f"({particle})"
    return Ket(np.array(vectors[(axis, sign)], dtype=complex), label)


def tensor(a: Ket, b: Ket) -> Ket:
    return Ket(np.kron(a.amplitudes, b.amplitudes), f"{a.label}{b.label}")


def singlet() -> Ket:
    """|S=0, S_y=0> = (i/sqrt(2)) [v+(1)v-(2) - v-(1)v+(2)]."""
    v_plus, v_minus = spin_basis("y", "+"), spin_basis("y", "-")
    state = tensor(v_plus, v_minus) - tensor(v_minus, v_plus)
    return Ket(state.amplitudes * (1j / np.sqrt(2.0)), "|S=0>")


def inner(a: Ket, b: Ket) -> complex:
    if a.dim != b.dim:
        raise LabError(f"Dimension mismatch: {a.dim} vs {b.dim}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def expect(op: LinOp, s: Ket, tol: float = TOLERANCES['exact']) -> float:
    if op.dim != s.dim:
        raise LabError(f"Operator dimension {op.dim} does not match state dimension {s.dim}")
    value = np.vdot(s.amplitudes, op.entries @ s.amplitudes)
    if abs(value.imag) > tol:
        raise HermiticityError(
            f"Expectation of {op.label or 'operator'} has imaginary part {value.imag:.3e}"
        )
    return float(value.real)


def commutator(a: LinOp, b: LinOp) -> LinOp:
    return LinOp(a.entries @ b.entries - b.entries @ a.entries, f"[{a.label},{b.label}]")


def angular_momentum_residuals(hbar: float = None) -> Dict[str, float]:
    """Max entrywise residual of [J_k, J_l] - i hbar eps_klm J_m for the three cyclic pairs."""
    hbar = settings.HBAR if hbar is None else hbar
    ops = {axis: spin_operator(axis, hbar=hbar) for axis in ("x", "y", "z")}
    residuals = {}
    for k, l, m in (("x", "y", "z"), ("y", "z", "x"), ("z", "x", "y")):
        lhs = commutator(ops[k], ops[l]).entries
        residuals[f"{k}{l}"] = float(np.max(np.abs(lhs - 1j * hbar * ops[m].entries)))
    return residuals


def eigenprojector(op: LinOp, eigenvalue: float, tol: float = 1e-9) -> LinOp:
    if not op.is_hermitian():
        raise HermiticityError(f"{op.label or 'operator'} is not Hermitian")
    values, vectors = np.linalg.eigh(op.entries)
    selected = vectors[:, np.abs(values - eigenvalue) <= tol]
    if selected.shape[1] == 0:
        raise LabError(f"{eigenvalue} is not an eigenvalue of {op.label or 'operator'}")
    return LinOp(selected @ selected.conj().T, f"P[{op.label}={eigenvalue:g}]")


def measure_projective(state: Ket, op: LinOp, eigenvalue: float) -> Tuple[Ket, float]:
    """Reduction onto the eigenspace of ``op``: returns the renormalized state and the Born probability."""
    projected = eigenprojector(op, eigenvalue) @ state
    probability = projected.norm ** 2
    if probability < TOLERANCES['sector_floor']:
        raise EmptySectorError(
            f"Outcome {eigenvalue:g} of {op.label} has probability {probability:.3e}"
        )
    logger.debug(f"Projective outcome {op.label}={eigenvalue:g} with probability {probability:.6f}")
    return projected.normalized(), float(probability)


def expand_in_basis(state: Ket, basis: Sequence[Ket]) -> List[complex]:
    return [inner(element, state) for element in basis]


def product_basis(axis: Axis) -> List[Ket]:
    plus1, minus1 = spin_basis(axis, "+", 1), spin_basis(axis, "-", 1)
    plus2, minus2 = spin_basis(axis, "+", 2), spin_basis(axis, "-", 2)
    return [tensor(plus1, plus2), tensor(minus1, plus2), tensor(plus1, minus2), tensor(minus1, minus2)]
