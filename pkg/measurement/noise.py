import logging
import math
from typing import Iterable, Optional, Tuple, Union

import numpy as np

from config.tolerances import TOLERANCES
from core.errors import LabError
from core.grid import TwoBodyWaveFn
from measurement.models import MeasurementModel, NoiseReport
from measurement.observables import Observable, parse_observable

logger = logging.getLogger(__name__)

Target = Union[str, Observable]


def _as_observable(model: MeasurementModel, target: Target) -> Observable:
    return target if isinstance(target, Observable) else model.target(target)


def _rms(observable: Observable, state: TwoBodyWaveFn) -> float:
    return math.sqrt(max(observable.expectation(state, power=2), 0.0))


def mean_and_variance(observable: Observable, state: TwoBodyWaveFn) -> Tuple[float, float]:
    mean = observable.expectation(state)
    second = observable.expectation(state, power=2)
    return mean, max(second - mean ** 2, 0.0)


def rms_noise(model: MeasurementModel, state: TwoBodyWaveFn, target: Target) -> float:
    """<(mu - A)^2>^(1/2) with mu the pointer designated for A's kind."""
    target = _as_observable(model, target)
    pointer = model.pointer_for(target)
    return _rms(pointer - target, state)


def prepare(model: MeasurementModel, state: TwoBodyWaveFn) -> TwoBodyWaveFn:
    """State after the coupling acts; a prepare coupling multiplies by a Gaussian window."""
    coupling = model.coupling
    if coupling.kind == "none":
        return state
    coordinate = parse_observable(coupling.coordinate, model.constants)
    if coordinate is None or coordinate.kind != "position":
        raise LabError(f"Preparation coordinate '{coupling.coordinate}' must be a position observable")
    values = coordinate.values(state)
    center = coordinate.expectation(state) if coupling.center is None else coupling.center
    window = np.exp(-((values - center) ** 2) / (4.0 * coupling.width ** 2))
    return state.with_amplitudes(state.amplitudes * window)


def rms_disturbance(model: MeasurementModel, state: TwoBodyWaveFn, target: Target) -> float:
    """<(A_final - A_initial)^2>^(1/2).

    A localization window leaves positions untouched and adds an independent
    momentum kick, so eta^2 = (Var_f - Var_i) + (mean_f - mean_i)^2.
    """
    target = _as_observable(model, target)
    if model.coupling.kind == "none" or target.kind == "position":
        return 0.0
    prepared = prepare(model, state)
    mean_i, var_i = mean_and_variance(target, state)
    mean_f, var_f = mean_and_variance(target, prepared)
    return math.sqrt(max(var_f - var_i, 0.0) + (mean_f - mean_i) ** 2)


def unbiased_check(model: MeasurementModel, states: Iterable[TwoBodyWaveFn],
                   tolerance: float = TOLERANCES['bias']) -> Tuple[bool, float]:
    """True when <mu - A> vanishes on every state for each designated pointer."""
    states = list(states)
    if not states:
        raise LabError("unbiased_check needs at least one state")
    errors = [model.pointer_for(model.target(model.target_x)) - model.target(model.target_x)]
    if model.pointer_p_observable is not None:
        errors.append(model.pointer_for(model.target(model.target_p)) - model.target(model.target_p))
    max_bias = max(abs(error.expectation(state)) for error in errors for state in states)
    return bool(max_bias <= tolerance), float(max_bias)


def indirect_error_via_q(state: TwoBodyWaveFn, c: float) -> float:
    """<(x2 - c)^2>^(1/2): error of x1 read off as q + c."""
    x2 = parse_observable("x2")
    values = x2.values(state) - c
    return math.sqrt(state.position_expectation(values ** 2))


def noise_report(model: MeasurementModel, state: TwoBodyWaveFn, sector_probability: float = 1.0,
                 momentum_resolution: Optional[float] = None) -> NoiseReport:
    target_x, target_p = model.target(model.target_x), model.target(model.target_p)
    epsilon_p = rms_noise(model, state, target_p) if model.pointer_p_observable is not None else None
    _, var_x = mean_and_variance(target_x, state)
    _, var_p = mean_and_variance(target_p, state)
    report = NoiseReport(
        epsilon_x=rms_noise(model, state, target_x),
        epsilon_p=epsilon_p,
        eta_x=rms_disturbance(model, state, target_x),
        eta_p=rms_disturbance(model, state, target_p),
        delta_x=math.sqrt(var_x),
        delta_p=math.sqrt(var_p),
        sector_probability=sector_probability,
        momentum_resolution=momentum_resolution,
        hbar=model.hbar,
    )
    logger.debug(f"Noise report for {model.pointer_x} -> {model.target_x}: {report.to_dict()}")
    return report
