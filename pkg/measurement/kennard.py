import logging
from typing import Tuple, Union

import numpy as np
import pandas as pd

from config.settings import settings
from config.tolerances import GRID_DEFAULTS, TOLERANCES
from core.errors import BoundaryError, LabError
from core.grid import Grid1D, GridWaveFn, boundary_support, gaussian_packet, momentum_stats, position_stats

logger = logging.getLogger(__name__)


def kennard_check(wf: GridWaveFn) -> Tuple[float, float, float, bool]:
    """(Delta x, Delta p, product, passed) for a state kept away from the periodic seam."""
    if not wf.normalized:
        raise LabError("kennard_check requires a normalized wavefunction")
    support = boundary_support(wf)
    if support >= TOLERANCES['boundary_support']:
        raise BoundaryError(f"State has boundary support {support:.3e}; Delta p would see the wrap")
    _, delta_x = position_stats(wf)
    _, delta_p = momentum_stats(wf)
    product = delta_x * delta_p
    passed = product >= 0.5 * wf.grid.hbar * (1 - TOLERANCES['kennard_slack'])
    return delta_x, delta_p, product, bool(passed)


def random_gaussian_mixture(grid: Grid1D, rng: np.random.Generator, max_components: int = 4) -> GridWaveFn:
    """Superposition of up to ``max_components`` Gaussians with complex weights.

    Centers stay within |x| <= L/6 of the grid center, widths between the
    resolution limit and L/48, carrier momenta on the lattice below p_max/8.
    """
    n_components = int(rng.integers(1, max_components + 1))
    min_width = GRID_DEFAULTS['gaussian_min_spacings'] * grid.spacing
    max_width = max(grid.length / 48.0, min_width)
    k_max = grid.n_points // 16

    amplitudes = np.zeros(grid.n_points, dtype=complex)
    for _ in range(n_components):
        center = grid.center + rng.uniform(-grid.length / 6.0, grid.length / 6.0)
        width = rng.uniform(min_width, max_width)
        momentum = int(rng.integers(-k_max, k_max + 1)) * grid.momentum_spacing
        weight = rng.normal() + 1j * rng.normal()
        amplitudes += weight * gaussian_packet(grid, center, width, momentum).amplitudes
    return GridWaveFn(grid, amplitudes, normalized=False).with_amplitudes(amplitudes)


def kennard_suite(grid: Grid1D = None, n_states: int = 500,
                  seed: Union[int, None] = None) -> pd.DataFrame:
    """Kennard products of ``n_states`` seeded random mixtures, one row per state."""
    grid = grid or Grid1D(settings.GRID_POINTS, 200.0)
    rng = np.random.default_rng(settings.SEED if seed is None else seed)
    rows = []
    for index in range(n_states):
        wf = random_gaussian_mixture(grid, rng)
        delta_x, delta_p, product, passed = kennard_check(wf)
        rows.append({
            'state': index,
            'delta_x': delta_x,
            'delta_p': delta_p,
            'product': product,
            'passed': passed,
        })
    df = pd.DataFrame(rows)
    failures = int((~df['passed']).sum())
    if failures:
        logger.warning(f"{failures} of {n_states} states failed the Kennard check")
    else:
        logger.info(f"All {n_states} random states satisfy the Kennard bound (min product {df['product'].min():.6f})")
    return df
