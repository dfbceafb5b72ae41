import re
from dataclasses import dataclass
from typing import Literal, Mapping, Optional, Tuple

import numpy as np

from config.settings import settings
from core.errors import ObservableError
from core.grid import TwoBodyWaveFn, momentum_weights, position_weights

Kind = Literal["position", "momentum"]

POSITION_NAMES = ("x1", "x2", "q", "Q")
MOMENTUM_NAMES = ("p1", "p2", "P", "p")

_NUMBER = r'\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?'
_TERM = re.compile(
    rf'\s*(?P<sign>[+-])?\s*(?:(?P<coef>{_NUMBER})\s*\*\s*)?(?P<atom>[A-Za-z_]\w*|{_NUMBER})\s*'
)


@dataclass(frozen=True)
class Observable:
    """Linear combination of named two-body coordinates plus a constant offset."""
    kind: Kind
    terms: Tuple[Tuple[float, str], ...]
    offset: float = 0.0
    label: str = ""

    def weights(self, masses: Tuple[float, float] = (1.0, 1.0)) -> Tuple[float, float]:
        lookup = position_weights if self.kind == "position" else momentum_weights
        w1 = w2 = 0.0
        for coef, name in self.terms:
            c1, c2 = lookup(name, masses)
            w1 += coef * c1
            w2 += coef * c2
        return w1, w2

    def values(self, state: TwoBodyWaveFn) -> np.ndarray:
        w1, w2 = self.weights(state.masses)
        if self.kind == "position":
            r1, r2 = state.physical_positions()
        else:
            r1, r2 = state.physical_momenta()
        return w1 * r1 + w2 * r2 + self.offset

    def expectation(self, state: TwoBodyWaveFn, power: int = 1) -> float:
        values = self.values(state) ** power
        if self.kind == "position":
            return state.position_expectation(values)
        return state.momentum_expectation(values)

    def __sub__(self, other: "Observable") -> "Observable":
        if self.kind != other.kind:
            raise ObservableError(f"Cannot subtract {other.kind} observable from {self.kind} observable")
        terms = self.terms + tuple((-coef, name) for coef, name in other.terms)
        return Observable(self.kind, terms, self.offset - other.offset, f"({self.label})-({other.label})")


class ObservableParser:
    @staticmethod
    def parse(text: str, constants: Optional[Mapping[str, float]] = None) -> Optional[Observable]:
        """Parse designations such as ``"x2"``, ``"q + c"``, ``"x2 + 0.5"``, ``"x1 identity"`` or ``"absent"``.

        Symbols other than coordinate names are resolved through ``constants``.
        """
        if text is None:
            return None
        cleaned = ObservableParser.clean_text(text)
        if cleaned in ("absent", "none", ""):
            return None
        cleaned = re.sub(r'\s+identity$', '', cleaned)

        constants = constants or {}
        terms, offset, kind = [], 0.0, None
        position = 0
        while position < len(cleaned):
            match = _TERM.match(cleaned, position)
            if not match or match.end() == position:
                raise ObservableError(f"Cannot parse observable '{text}' at position {position}")
            if position > 0 and match.group('sign') is None:
                raise ObservableError(f"Missing operator between terms in '{text}'")
            position = match.end()

            sign = -1.0 if match.group('sign') == '-' else 1.0
            coef = float(match.group('coef')) if match.group('coef') else 1.0
            atom = match.group('atom')
            if atom in POSITION_NAMES or atom in MOMENTUM_NAMES:
                term_kind = "position" if atom in POSITION_NAMES else "momentum"
                if kind is not None and kind != term_kind:
                    raise ObservableError(f"Observable '{text}' mixes positions and momenta")
                kind = term_kind
                terms.append((sign * coef, atom))
            elif re.fullmatch(_NUMBER, atom):
                offset += sign * coef * float(atom)
            elif atom in constants:
                offset += sign * coef * float(constants[atom])
            else:
                raise ObservableError(f"Unknown symbol '{atom}' in observable '{text}'")

        if kind is None:
            raise ObservableError(f"Observable '{text}' names no coordinate")
        return Observable(kind, tuple(terms), offset, cleaned)

    @staticmethod
    def clean_text(text: str) -> str:
        return ' '.join(text.strip().split())


def parse_observable(text: str, constants: Optional[Mapping[str, float]] = None) -> Optional[Observable]:
    return ObservableParser.parse(text, constants)


def canonical_commutator(a: Observable, b: Observable,
                         masses: Tuple[float, float] = (1.0, 1.0), hbar: float = None) -> complex:
    """[A, B] for linear observables: i hbar sum_i a_i b_i between a position and a momentum combination."""
    hbar = settings.HBAR if hbar is None else hbar
    if a.kind == b.kind:
        return 0j
    wa, wb = np.array(a.weights(masses)), np.array(b.weights(masses))
    value = 1j * hbar * float(wa @ wb)
    return value if a.kind == "position" else -value
