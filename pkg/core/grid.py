from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Literal, Sequence, Tuple, Union

import numpy as np

from config.settings import settings
from config.tolerances import GRID_DEFAULTS, TOLERANCES
from core.errors import (
    BoundaryError,
    EmptySectorError,
    GeometryError,
    LabError,
    LatticeError,
    OverlapError,
    ResolutionError,
)

logger = logging.getLogger(__name__)

Representation = Literal["position", "momentum"]
Frame = Literal["particles", "relative"]
Interval = Tuple[float, float]


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def next_power_of_two(n: float) -> int:
    return 1 << max(0, math.ceil(math.log2(max(n, 1))))


@dataclass(frozen=True)
class Grid1D:
    n_points: int
    length: float
    center: float = 0.0
    hbar: float = field(default_factory=lambda: settings.HBAR)

    def __post_init__(self):
        if not _is_power_of_two(self.n_points) or self.n_points < GRID_DEFAULTS['min_points']:
            raise ResolutionError(
                f"n_points must be a power of two >= {GRID_DEFAULTS['min_points']}, got {self.n_points}"
            )
        if not self.length > 0:
            raise GeometryError(f"Grid length must be positive, got {self.length}")
        if not self.hbar > 0:
            raise LabError(f"hbar must be positive, got {self.hbar}")

    @classmethod
    def covering(cls, length: float, max_spacing: float, center: float = 0.0,
                 hbar: float = None, min_points: int = None) -> "Grid1D":
        """Smallest power-of-two grid of the given length whose spacing is at most ``max_spacing``."""
        min_points = min_points or GRID_DEFAULTS['min_points']
        n_points = max(min_points, next_power_of_two(length / max_spacing))
        hbar = settings.HBAR if hbar is None else hbar
        return cls(n_points=n_points, length=length, center=center, hbar=hbar)

    @property
    def spacing(self) -> float:
        return self.length / self.n_points

    @property
    def lo(self) -> float:
        return self.center - 0.5 * self.length

    @property
    def hi(self) -> float:
        return self.center + 0.5 * self.length

    @property
    def momentum_spacing(self) -> float:
        return 2.0 * math.pi * self.hbar / self.length

    @cached_property
    def positions(self) -> np.ndarray:
        return self.lo + self.spacing * np.arange(self.n_points)

    @cached_property
    def lattice_indices(self) -> np.ndarray:
        return np.arange(-self.n_points // 2, self.n_points // 2)

    @cached_property
    def momenta(self) -> np.ndarray:
        return self.momentum_spacing * self.lattice_indices

    def lattice_index(self, p: float) -> int:
        """Integer k with p = 2 pi hbar k / L; raises if p is off the lattice."""
        k = p / self.momentum_spacing
        k_int = int(round(k))
        if abs(k - k_int) > 1e-9 * max(1.0, abs(k)):
            raise LatticeError(f"Momentum {p} is not on the lattice 2*pi*hbar*k/{self.length}")
        if not -self.n_points // 2 <= k_int < self.n_points // 2:
            raise LatticeError(f"Momentum {p} lies outside the representable band")
        return k_int

    def check_interval(self, interval: Interval) -> Interval:
        lo, hi = float(interval[0]), float(interval[1])
        slack = 1e-9 * self.spacing
        if not hi > lo:
            raise GeometryError(f"Empty interval [{lo}, {hi}]")
        if lo < self.lo - slack or hi > self.hi + slack:
            raise GeometryError(f"Interval [{lo}, {hi}] outside grid domain [{self.lo}, {self.hi}]")
        return lo, hi

    def interval_mask(self, interval: Interval, coordinates: np.ndarray = None,
                      spacing: float = None) -> np.ndarray:
        coordinates = self.positions if coordinates is None else coordinates
        spacing = self.spacing if spacing is None else spacing
        lo, hi = interval
        eps = 1e-9 * spacing
        return (coordinates >= lo - eps) & (coordinates < hi - eps)


# ---------------------------------------------------------------------------
# spectral helpers

def _to_momentum(amplitudes: np.ndarray, grid: Grid1D, axis: int = 0) -> np.ndarray:
    shape = [1] * amplitudes.ndim
    shape[axis] = grid.n_points
    phase = np.exp(-1j * grid.momenta * grid.lo / grid.hbar).reshape(shape)
    spectrum = np.fft.fftshift(np.fft.fft(amplitudes, axis=axis), axes=axis)
    return spectrum * phase * (grid.spacing / math.sqrt(2.0 * math.pi * grid.hbar))


def _to_position(amplitudes: np.ndarray, grid: Grid1D, axis: int = 0) -> np.ndarray:
    shape = [1] * amplitudes.ndim
    shape[axis] = grid.n_points
    phase = np.exp(1j * grid.momenta * grid.lo / grid.hbar).reshape(shape)
    unshifted = np.fft.ifftshift(amplitudes * phase, axes=axis)
    return np.fft.ifft(unshifted, axis=axis) * (math.sqrt(2.0 * math.pi * grid.hbar) / grid.spacing)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


# ---------------------------------------------------------------------------
# one-body wavefunctions
# sum(|psi_j|^2) * spacing = 1; momentum samples sit on p_k = 2 pi hbar k / L, k = -N/2 .. N/2 - 1
@dataclass(frozen=True, eq=False)
class GridWaveFn:
    grid: Grid1D
    amplitudes: np.ndarray
    representation: Representation = "position"
    normalized: bool = True

    def __post_init__(self):
        amplitudes = _frozen(self.amplitudes)
        if amplitudes.shape != (self.grid.n_points,):
            raise LabError(f"Amplitude shape {amplitudes.shape} does not match grid of {self.grid.n_points}")
        object.__setattr__(self, "amplitudes", amplitudes)
        if self.normalized and abs(self.norm_squared - 1.0) > TOLERANCES['norm']:
            raise LabError(f"State marked normalized has norm^2 {self.norm_squared:.12f}")

    @property
    def coordinates(self) -> np.ndarray:
        return self.grid.positions if self.representation == "position" else self.grid.momenta

    @property
    def measure(self) -> float:
        return self.grid.spacing if self.representation == "position" else self.grid.momentum_spacing

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm_squared(self) -> float:
        return float(np.sum(self.density) * self.measure)

    def position_density(self) -> np.ndarray:
        return as_position(self).density

    def momentum_density(self) -> np.ndarray:
        return as_momentum(self).density

    def with_amplitudes(self, amplitudes: np.ndarray, normalize: bool = True) -> "GridWaveFn":
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if normalize:
            norm = math.sqrt(float(np.sum(np.abs(amplitudes) ** 2)) * self.measure)
            if norm == 0:
                raise EmptySectorError("Cannot normalize a vanishing wavefunction")
            amplitudes = amplitudes / norm
        return GridWaveFn(self.grid, amplitudes, self.representation, normalized=normalize)

    def translated(self, n_points: int) -> "GridWaveFn":
        return GridWaveFn(self.grid, np.roll(self.amplitudes, n_points), self.representation, self.normalized)


def as_position(wf: GridWaveFn) -> GridWaveFn:
    return wf if wf.representation == "position" else spectral_transform(wf)


def as_momentum(wf: GridWaveFn) -> GridWaveFn:
    return wf if wf.representation == "momentum" else spectral_transform(wf)


def spectral_transform(wf: GridWaveFn) -> GridWaveFn:
    if wf.representation == "position":
        return GridWaveFn(wf.grid, _to_momentum(wf.amplitudes, wf.grid), "momentum", wf.normalized)
    return GridWaveFn(wf.grid, _to_position(wf.amplitudes, wf.grid), "position", wf.normalized)


def _moments(values: np.ndarray, weights: np.ndarray) -> Tuple[float, float]:
    total = float(np.sum(weights))
    mean = float(np.sum(values * weights) / total)
    variance = float(np.sum((values - mean) ** 2 * weights) / total)
    return mean, math.sqrt(max(variance, 0.0))


def position_stats(wf: GridWaveFn) -> Tuple[float, float]:
    wf = as_position(wf)
    return _moments(wf.grid.positions, wf.density)


def momentum_stats(wf: GridWaveFn) -> Tuple[float, float]:
    wf = as_momentum(wf)
    return _moments(wf.grid.momenta, wf.density)


def boundary_support(wf: GridWaveFn) -> float:
    """Probability carried by the two samples adjacent to the periodic seam."""
    wf = as_position(wf)
    return float((wf.density[0] + wf.density[-1]) * wf.grid.spacing)


def gaussian_packet(grid: Grid1D, center: float, width: float, momentum: float = 0.0) -> GridWaveFn:
    if width < GRID_DEFAULTS['gaussian_min_spacings'] * grid.spacing:
        raise ResolutionError(
            f"Packet width {width} below {GRID_DEFAULTS['gaussian_min_spacings']} grid spacings ({grid.spacing})"
        )
    clearance = GRID_DEFAULTS['boundary_sigmas'] * width
    if center - clearance < grid.lo or center + clearance > grid.hi:
        raise BoundaryError(
            f"Packet at {center} with width {width} comes within {GRID_DEFAULTS['boundary_sigmas']} widths of the boundary"
        )
    x = grid.positions
    amplitudes = np.exp(-((x - center) ** 2) / (4.0 * width ** 2) + 1j * momentum * x / grid.hbar)
    return GridWaveFn(grid, amplitudes, normalized=False).with_amplitudes(amplitudes)


def plane_wave(grid: Grid1D, p: float) -> GridWaveFn:
    grid.lattice_index(p)
    amplitudes = np.exp(1j * p * grid.positions / grid.hbar) / math.sqrt(grid.length)
    return GridWaveFn(grid, amplitudes)


def free_propagate(wf: GridWaveFn, mass: float = None, time: float = 0.0) -> GridWaveFn:
    mass = settings.MASS if mass is None else mass
    if time < 0:
        raise LabError(f"Propagation time must be non-negative, got {time}")
    if time == 0:
        return wf
    momentum = as_momentum(wf)
    p = wf.grid.momenta
    phase = np.exp(-1j * p ** 2 * time / (2.0 * mass * wf.grid.hbar))
    evolved = GridWaveFn(wf.grid, momentum.amplitudes * phase, "momentum", wf.normalized)
    return evolved if wf.representation == "momentum" else spectral_transform(evolved)


@dataclass(frozen=True)
class PacketLayout:
    start: float
    width: float
    count: int

    def interval(self, n: int) -> Interval:
        if not 0 <= n < self.count:
            raise LabError(f"Packet index {n} outside 0..{self.count - 1}")
        return self.start + n * self.width, self.start + (n + 1) * self.width

    def center(self, n: int) -> float:
        lo, hi = self.interval(n)
        return 0.5 * (lo + hi)

    def index_of(self, position: float) -> int:
        n = int(math.floor((position - self.start) / self.width + 1e-9))
        if not 0 <= n < self.count:
            raise GeometryError(f"Position {position} lies outside the packet layout")
        return n

    @property
    def span(self) -> Interval:
        return self.start, self.start + self.count * self.width


def packet_layout(grid: Grid1D, packet_width: float, n_packets: int = None,
                  center: float = None) -> PacketLayout:
    if packet_width < GRID_DEFAULTS['packet_min_spacings'] * grid.spacing:
        raise ResolutionError(
            f"Packet width {packet_width} below {GRID_DEFAULTS['packet_min_spacings']} grid spacings ({grid.spacing})"
        )
    if n_packets is None:
        n_packets = int(math.floor(grid.length / packet_width + 1e-9))
    center = grid.center if center is None else center
    if n_packets < 1:
        raise LabError("At least one packet is required")
    if n_packets * packet_width > grid.length * (1 + 1e-9):
        raise OverlapError(
            f"{n_packets} packets of width {packet_width} cannot fit without overlap in length {grid.length}"
        )
    layout = PacketLayout(center - 0.5 * n_packets * packet_width, packet_width, n_packets)
    grid.check_interval(layout.span)
    return layout


def packet_superposition(grid: Grid1D, packet_width: float,
                         amplitudes: Union[str, Sequence[complex]] = "uniform",
                         n_packets: int = None, center: float = None) -> GridWaveFn:
    """sum_n a_n psi_n with psi_n a Gaussian truncated at 3 sigma inside bin n."""
    if isinstance(amplitudes, str):
        if amplitudes != "uniform":
            raise LabError(f"Unknown amplitude specification '{amplitudes}'")
        layout = packet_layout(grid, packet_width, n_packets, center)
        coefficients = np.full(layout.count, 1.0 / math.sqrt(layout.count), dtype=complex)
    else:
        coefficients = np.asarray(amplitudes, dtype=complex)
        layout = packet_layout(grid, packet_width, n_packets or coefficients.size, center)
        if coefficients.size != layout.count:
            raise LabError(f"Got {coefficients.size} amplitudes for {layout.count} packets")
        total = float(np.sum(np.abs(coefficients) ** 2))
        if abs(total - 1.0) > TOLERANCES['norm']:
            raise LabError(f"Packet amplitudes must satisfy sum |a_n|^2 = 1, got {total}")

    x = grid.positions
    sigma = packet_width / (2.0 * GRID_DEFAULTS['packet_truncation_sigmas'])
    bins = np.floor((x - layout.start) / packet_width + 1e-9).astype(int)
    result = np.zeros(grid.n_points, dtype=complex)
    for n, a_n in enumerate(coefficients):
        inside = bins == n
        profile = np.where(inside, np.exp(-((x - layout.center(n)) ** 2) / (4.0 * sigma ** 2)), 0.0)
        norm = math.sqrt(float(np.sum(profile ** 2)) * grid.spacing)
        result += a_n * profile / norm
    logger.debug(f"Built superposition of {layout.count} packets of width {packet_width}")
    return GridWaveFn(grid, result)


def sector_probability(wf: GridWaveFn, interval: Interval) -> float:
    interval = wf.grid.check_interval(interval) if wf.representation == "position" else interval
    mask = wf.grid.interval_mask(interval, wf.coordinates, wf.measure)
    return float(min(1.0, np.sum(wf.density[mask]) * wf.measure))


def reduce(wf: GridWaveFn, interval: Interval,
           floor: float = TOLERANCES['sector_floor']) -> Tuple[GridWaveFn, float]:
    """Projection onto ``interval`` followed by renormalization."""
    probability = sector_probability(wf, interval)
    if probability < floor:
        raise EmptySectorError(f"Sector {interval} has probability {probability:.3e} below {floor:.1e}")
    mask = wf.grid.interval_mask(interval, wf.coordinates, wf.measure)
    reduced = wf.with_amplitudes(np.where(mask, wf.amplitudes, 0.0))
    return reduced, probability


def overlap(a: GridWaveFn, b: GridWaveFn) -> complex:
    a, b = as_position(a), as_position(b)
    return complex(np.vdot(a.amplitudes, b.amplitudes) * a.grid.spacing)


def born_sample(wf: Union[GridWaveFn, "TwoBodyWaveFn"], n_samples: int,
                rng: Union[int, np.random.Generator, None] = None, axis: int = None) -> np.ndarray:
    """Positions drawn from |psi|^2 (a marginal when ``axis`` selects one axis of a two-body state)."""
    rng = np.random.default_rng(rng if rng is not None else settings.SEED)
    if isinstance(wf, TwoBodyWaveFn):
        if axis not in (0, 1):
            raise LabError("Two-body sampling requires axis 0 or 1")
        probabilities = wf.marginal_density(axis)
        coordinates = wf.grids[axis].positions
    else:
        wf = as_position(wf)
        probabilities = wf.density
        coordinates = wf.grid.positions
    probabilities = probabilities / probabilities.sum()
    return coordinates[rng.choice(coordinates.size, size=n_samples, p=probabilities)]


# ---------------------------------------------------------------------------
# two-body wavefunctions

# Physical coordinates (r1, r2) = M (a, b) for the stored axes (a, b).
_COORDINATE_MATRICES = {
    "particles": np.array([[1.0, 0.0], [0.0, 1.0]]),
    "relative": np.array([[1.0, 1.0], [1.0, 0.0]]),
}


def position_weights(name: str, masses: Tuple[float, float] = (1.0, 1.0)) -> Tuple[float, float]:
    m1, m2 = masses
    table = {
        "x1": (1.0, 0.0),
        "x2": (0.0, 1.0),
        "q": (1.0, -1.0),
        "Q": (m1 / (m1 + m2), m2 / (m1 + m2)),
    }
    if name not in table:
        raise LabError(f"Unknown position observable '{name}'")
    return table[name]


def momentum_weights(name: str, masses: Tuple[float, float] = (1.0, 1.0)) -> Tuple[float, float]:
    m1, m2 = masses
    table = {
        "p1": (1.0, 0.0),
        "p2": (0.0, 1.0),
        "P": (1.0, 1.0),
        "p": (m2 / (m1 + m2), -m1 / (m1 + m2)),
    }
    if name not in table:
        raise LabError(f"Unknown momentum observable '{name}'")
    return table[name]


@dataclass(frozen=True, eq=False)
class TwoBodyWaveFn:
    grid_a: Grid1D
    grid_b: Grid1D
    amplitudes: np.ndarray
    frame: Frame = "particles"
    axis_name: str = "x"
    masses: Tuple[float, float] = (1.0, 1.0)
    normalized: bool = True

    def __post_init__(self):
        amplitudes = _frozen(self.amplitudes)
        if amplitudes.shape != (self.grid_a.n_points, self.grid_b.n_points):
            raise LabError(f"Amplitude shape {amplitudes.shape} does not match the grids")
        if self.frame not in _COORDINATE_MATRICES:
            raise LabError(f"Unknown coordinate frame '{self.frame}'")
        if self.grid_a.hbar != self.grid_b.hbar:
            raise LabError("Both grids must share the same hbar")
        object.__setattr__(self, "amplitudes", amplitudes)
        if self.normalized and abs(self.norm_squared - 1.0) > TOLERANCES['norm']:
            raise LabError(f"Two-body state marked normalized has norm^2 {self.norm_squared:.12f}")

    @classmethod
    def product(cls, wf_a: GridWaveFn, wf_b: GridWaveFn, frame: Frame = "particles",
                axis_name: str = "x", masses: Tuple[float, float] = (1.0, 1.0)) -> "TwoBodyWaveFn":
        wf_a, wf_b = as_position(wf_a), as_position(wf_b)
        return cls(wf_a.grid, wf_b.grid, np.outer(wf_a.amplitudes, wf_b.amplitudes), frame, axis_name, masses)

    @classmethod
    def from_function(cls, grid_a: Grid1D, grid_b: Grid1D, fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
                      frame: Frame = "particles", axis_name: str = "x",
                      masses: Tuple[float, float] = (1.0, 1.0)) -> "TwoBodyWaveFn":
        a, b = np.meshgrid(grid_a.positions, grid_b.positions, indexing="ij")
        raw = np.asarray(fn(a, b), dtype=complex)
        norm = math.sqrt(float(np.sum(np.abs(raw) ** 2)) * grid_a.spacing * grid_b.spacing)
        if norm == 0:
            raise EmptySectorError("Amplitude function vanishes on the grid")
        return cls(grid_a, grid_b, raw / norm, frame, axis_name, masses)

    @property
    def grids(self) -> Tuple[Grid1D, Grid1D]:
        return self.grid_a, self.grid_b

    @property
    def hbar(self) -> float:
        return self.grid_a.hbar

    @property
    def labels(self) -> Tuple[str, str]:
        s = self.axis_name
        if self.frame == "particles":
            return f"{s}1", f"{s}2"
        return f"{s}2", "q" if s == "x" else f"q_{s}"

    @property
    def area(self) -> float:
        return self.grid_a.spacing * self.grid_b.spacing

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm_squared(self) -> float:
        return float(np.sum(self.density) * self.area)

    def marginal_density(self, axis: int) -> np.ndarray:
        other = self.grid_b if axis == 0 else self.grid_a
        return np.sum(self.density, axis=1 - axis) * other.spacing

    def momentum_amplitudes(self) -> np.ndarray:
        spectrum = _to_momentum(self.amplitudes, self.grid_a, axis=0)
        return _to_momentum(spectrum, self.grid_b, axis=1)

    def momentum_density(self) -> np.ndarray:
        return np.abs(self.momentum_amplitudes()) ** 2

    def propagated(self, time: float) -> "TwoBodyWaveFn":
        """Free evolution of both particles, exp(-i (p1^2/2m1 + p2^2/2m2) t / hbar)."""
        if time < 0:
            raise LabError(f"Propagation time must be non-negative, got {time}")
        if time == 0:
            return self
        p1, p2 = self.physical_momenta()
        m1, m2 = self.masses
        phase = np.exp(-1j * (p1 ** 2 / (2.0 * m1) + p2 ** 2 / (2.0 * m2)) * time / self.hbar)
        evolved = _to_position(self.momentum_amplitudes() * phase, self.grid_a, axis=0)
        evolved = _to_position(evolved, self.grid_b, axis=1)
        return TwoBodyWaveFn(self.grid_a, self.grid_b, evolved, self.frame, self.axis_name,
                             self.masses, self.normalized)

    @property
    def momentum_area(self) -> float:
        return self.grid_a.momentum_spacing * self.grid_b.momentum_spacing

    def physical_positions(self) -> Tuple[np.ndarray, np.ndarray]:
        a, b = np.meshgrid(self.grid_a.positions, self.grid_b.positions, indexing="ij")
        m = _COORDINATE_MATRICES[self.frame]
        return m[0, 0] * a + m[0, 1] * b, m[1, 0] * a + m[1, 1] * b

    def physical_momenta(self) -> Tuple[np.ndarray, np.ndarray]:
        ka, kb = np.meshgrid(self.grid_a.momenta, self.grid_b.momenta, indexing="ij")
        m = np.linalg.inv(_COORDINATE_MATRICES[self.frame]).T
        return m[0, 0] * ka + m[0, 1] * kb, m[1, 0] * ka + m[1, 1] * kb

    def coordinate(self, name: str) -> np.ndarray:
        c1, c2 = position_weights(name, self.masses)
        r1, r2 = self.physical_positions()
        return c1 * r1 + c2 * r2

    def momentum(self, name: str) -> np.ndarray:
        d1, d2 = momentum_weights(name, self.masses)
        p1, p2 = self.physical_momenta()
        return d1 * p1 + d2 * p2

    def position_expectation(self, values: np.ndarray) -> float:
        return float(np.sum(self.density * values) * self.area)

    def momentum_expectation(self, values: np.ndarray) -> float:
        return float(np.sum(self.momentum_density() * values) * self.momentum_area)

    def stats(self, name: str) -> Tuple[float, float]:
        """(mean, standard deviation) of a named position or momentum observable."""
        try:
            values, density = self.coordinate(name), self.density
        except LabError:
            values, density = self.momentum(name), self.momentum_density()
        return _moments(values, density)

    def boundary_support(self) -> float:
        seam = self.density[[0, -1], :].sum() * self.area + self.density[:, [0, -1]].sum() * self.area
        return float(seam)

    def with_amplitudes(self, amplitudes: np.ndarray) -> "TwoBodyWaveFn":
        amplitudes = np.asarray(amplitudes, dtype=complex)
        norm = math.sqrt(float(np.sum(np.abs(amplitudes) ** 2)) * self.area)
        if norm == 0:
            raise EmptySectorError("Cannot normalize a vanishing two-body wavefunction")
        return TwoBodyWaveFn(self.grid_a, self.grid_b, amplitudes / norm, self.frame,
                             self.axis_name, self.masses)

    def translated(self, shift_a: int, shift_b: int) -> "TwoBodyWaveFn":
        return TwoBodyWaveFn(self.grid_a, self.grid_b, np.roll(self.amplitudes, (shift_a, shift_b), axis=(0, 1)),
                             self.frame, self.axis_name, self.masses, self.normalized)

    def sector_probability(self, axis: int, interval: Interval) -> float:
        grid = self.grids[axis]
        grid.check_interval(interval)
        mask = grid.interval_mask(interval)
        return float(min(1.0, np.sum(self.marginal_density(axis)[mask]) * grid.spacing))

    def reduce(self, axis: int, interval: Interval,
               floor: float = TOLERANCES['sector_floor']) -> Tuple["TwoBodyWaveFn", float]:
        probability = self.sector_probability(axis, interval)
        if probability < floor:
            raise EmptySectorError(f"Sector {interval} on axis {axis} has probability {probability:.3e}")
        mask = self.grids[axis].interval_mask(interval)
        mask2d = mask[:, None] if axis == 0 else mask[None, :]
        return self.with_amplitudes(np.where(mask2d, self.amplitudes, 0.0)), probability

    def relabel(self) -> "TwoBodyWaveFn":
        """(x1, x2) <-> (x2, q = x1 - x2) on identical periodic grids; an exact permutation of samples."""
        if self.grid_a != self.grid_b:
            raise LabError("Relabeling requires identical grids on both axes")
        grid = self.grid_a
        offset = grid.lo / grid.spacing
        if abs(offset - round(offset)) > 1e-9:
            raise LabError("Relabeling requires the grid origin to sit on a lattice point")
        n, offset = grid.n_points, int(round(offset))
        i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        if self.frame == "particles":
            # psi'(x2_i, q_j) = psi(x1 = x2_i + q_j, x2_i)
            amplitudes = self.amplitudes[(i + j + offset) % n, i]
            frame = "relative"
        else:
            # psi(x1_i, x2_j) = psi'(x2_j, q = x1_i - x2_j)
            amplitudes = self.amplitudes[j, (i - j - offset) % n]
            frame = "particles"
        return TwoBodyWaveFn(grid, grid, amplitudes, frame, self.axis_name, self.masses, self.normalized)
