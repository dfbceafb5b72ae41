from dataclasses import dataclass, field
from typing import Dict, Literal, Mapping, Optional

from config.settings import settings
from config.tolerances import TOLERANCES
from core.errors import ObservableError
from measurement.observables import Observable, canonical_commutator, parse_observable


@dataclass(frozen=True)
class Coupling:
    """How the apparatus acts on the system before the pointers are read.

    ``none``: pointers are identified with system observables, nothing evolves.
    ``prepare``: a Gaussian localization of ``coordinate`` with the given width
    precedes the read-out (``center`` defaults to the state's mean).
    """
    kind: Literal["none", "prepare"] = "none"
    width: Optional[float] = None
    coordinate: str = "q"
    center: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("none", "prepare"):
            raise ObservableError(f"Unknown coupling '{self.kind}'")
        if self.kind == "prepare" and not (self.width and self.width > 0):
            raise ObservableError("A prepare coupling needs a positive width")


@dataclass(frozen=True)
class MeasurementModel:
    pointer_x: Optional[str]
    pointer_p: Optional[str] = "absent"
    coupling: Coupling = field(default_factory=Coupling)
    target_x: str = "x1"
    target_p: str = "p1"
    constants: Mapping[str, float] = field(default_factory=dict)
    masses: tuple = (1.0, 1.0)
    hbar: float = field(default_factory=lambda: settings.HBAR)

    def __post_init__(self):
        x_pointer, p_pointer = self.pointer_x_observable, self.pointer_p_observable
        if x_pointer is not None and x_pointer.kind != "position":
            raise ObservableError(f"pointer_x '{self.pointer_x}' is not a position observable")
        if p_pointer is not None and p_pointer.kind != "momentum":
            raise ObservableError(f"pointer_p '{self.pointer_p}' is not a momentum observable")
        if x_pointer is not None and p_pointer is not None:
            commutator = canonical_commutator(x_pointer, p_pointer, self.masses, self.hbar)
            if abs(commutator) > TOLERANCES['exact']:
                raise ObservableError(
                    f"Pointers '{self.pointer_x}' and '{self.pointer_p}' do not commute ([.,.] = {commutator})"
                )

    @property
    def pointer_x_observable(self) -> Optional[Observable]:
        return parse_observable(self.pointer_x, self.constants)

    @property
    def pointer_p_observable(self) -> Optional[Observable]:
        return parse_observable(self.pointer_p, self.constants)

    def pointer_for(self, target: Observable) -> Observable:
        pointer = self.pointer_x_observable if target.kind == "position" else self.pointer_p_observable
        if pointer is None:
            raise ObservableError(f"No {target.kind} pointer is designated for target '{target.label}'")
        return pointer

    def target(self, text: str) -> Observable:
        return parse_observable(text, self.constants)

    def describe(self) -> Dict[str, object]:
        return {
            'pointer_x': self.pointer_x,
            'pointer_p': self.pointer_p or "absent",
            'coupling': self.coupling.kind,
            'coupling_width': self.coupling.width,
            'target_x': self.target_x,
            'target_p': self.target_p,
        }


def _product(a: Optional[float], b: Optional[float]) -> Optional[float]:
    if a is None or b is None:
        return None
    return a * b


@dataclass
class NoiseReport:
    epsilon_x: float
    epsilon_p: Optional[float]
    eta_x: float
    eta_p: float
    delta_x: float
    delta_p: float
    sector_probability: float = 1.0
    momentum_resolution: Optional[float] = None
    hbar: float = field(default_factory=lambda: settings.HBAR)
    undisturbed_positions: bool = True

    @property
    def product_ex_ep(self) -> Optional[float]:
        return _product(self.epsilon_x, self.epsilon_p)

    @property
    def product_ex_etap(self) -> float:
        return self.epsilon_x * self.eta_p

    @property
    def product_ep_etax(self) -> Optional[float]:
        return _product(self.epsilon_p, self.eta_x)

    @property
    def product_dx_dp(self) -> float:
        return self.delta_x * self.delta_p

    def _resolved(self, value: Optional[float]) -> Optional[float]:
        """A momentum-side rms that vanishes identically is read at the box lattice resolution."""
        if value is None or self.momentum_resolution is None:
            return value
        return self.momentum_resolution if value <= TOLERANCES['exact'] else value

    def _evades(self, product: Optional[float]) -> Optional[bool]:
        if product is None:
            return None
        return bool(product < 0.5 * self.hbar * (1 - TOLERANCES['evasion_margin']))

    @property
    def evasion_flags(self) -> Dict[str, Optional[bool]]:
        return {
            'ex_ep': self._evades(_product(self.epsilon_x, self._resolved(self.epsilon_p))),
            'ex_etap': self._evades(self.epsilon_x * self._resolved(self.eta_p)),
            # position disturbance vanishes without dynamics; the pair is not a trade-off then
            'ep_etax': None if self.undisturbed_positions else self._evades(self.product_ep_etax),
            'dx_dp': self._evades(self.product_dx_dp),
        }

    @property
    def evasion(self) -> bool:
        return any(flag for flag in self.evasion_flags.values())

    def to_dict(self) -> dict:
        flags = self.evasion_flags
        return {
            'epsilon_x': self.epsilon_x,
            'epsilon_p': self.epsilon_p,
            'eta_x': self.eta_x,
            'eta_p': self.eta_p,
            'delta_x': self.delta_x,
            'delta_p': self.delta_p,
            'product_ex_ep': self.product_ex_ep,
            'product_ex_etap': self.product_ex_etap,
            'product_ep_etax': self.product_ep_etax,
            'product_dx_dp': self.product_dx_dp,
            'momentum_resolution': self.momentum_resolution,
            'evasion_ex_ep': flags['ex_ep'],
            'evasion_ex_etap': flags['ex_etap'],
            'evasion_ep_etax': flags['ep_etax'],
            'evasion_dx_dp': flags['dx_dp'],
            'evasion': self.evasion,
            'sector_probability': self.sector_probability,
        }
