import math
from typing import Tuple

import numpy as np

from config.settings import settings
from config.tolerances import TOLERANCES
from core.grid import Grid1D, TwoBodyWaveFn


def entanglement_criterion(state: TwoBodyWaveFn) -> Tuple[float, bool]:
    """Var(x1 - x2) + Var(p1 + p2); below 2 hbar the pair cannot be separable."""
    _, delta_q = state.stats("q")
    _, delta_total = state.stats("P")
    total = delta_q ** 2 + delta_total ** 2
    entangled = total < 2.0 * state.hbar * (1 - TOLERANCES['evasion_margin'])
    return float(total), bool(entangled)


def squeezed_pair(grid: Grid1D, squeezing: float, hbar: float = None) -> TwoBodyWaveFn:
    """Two-mode Gaussian with Var(x1 - x2) = Var(p1 + p2) = hbar exp(-2r).

    squeezing = 0 gives the product of two minimal Gaussians with sigma^2 = hbar/2.
    """
    hbar = grid.hbar if hbar is None else hbar
    narrow = hbar * math.exp(-2.0 * squeezing)
    wide = hbar * math.exp(2.0 * squeezing)

    def amplitude(x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
        u, v = x1 - x2, x1 + x2
        return np.exp(-(u ** 2) / (4.0 * narrow) - (v ** 2) / (4.0 * wide))

    return TwoBodyWaveFn.from_function(grid, grid, amplitude)


def default_pair_grid(hbar: float = None) -> Grid1D:
    hbar = settings.HBAR if hbar is None else hbar
    return Grid1D(512, 24.0 * math.sqrt(hbar), hbar=hbar)
