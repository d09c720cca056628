"""Parameter sweeps, one-axis QFI maximisation and the canned figure grids."""
from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .entanglement import state_concurrence
from .errors import InvalidParameter, MetrologyError
from .estimation import qfi_closed
from .model import (
    Acceleration,
    DirectNu,
    ModelParams,
    Physical,
    StateCoefficients,
    Temperature,
    evolved_state,
    state_coefficients,
)

AXIS_NAMES = ("nu", "a", "T", "omega", "delta", "theta")
FLAG_NO_INTERIOR_MAX = "no_interior_max"
FLIP_TOL = 1e-14
_INV_PHI = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class AxisSpec:
    name: str
    start: float
    stop: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise InvalidParameter(f"unknown axis {self.name!r}; expected one of {AXIS_NAMES}")
        if self.scale not in ("linear", "log"):
            raise InvalidParameter(f"scale must be 'linear' or 'log', got {self.scale!r}")
        if int(self.points) != self.points or self.points < 2:
            raise InvalidParameter(f"an axis needs at least 2 points, got {self.points!r}")
        if not self.start < self.stop:
            raise InvalidParameter(f"axis {self.name}: start must be below stop")
        if self.scale == "log" and not self.start > 0:
            raise InvalidParameter(f"axis {self.name}: log scale needs start > 0")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, int(self.points))
        return np.linspace(self.start, self.stop, int(self.points))


@dataclass(frozen=True)
class SweepRecord:
    coordinates: dict
    qfi: float
    concurrence: float
    coefficients: Optional[StateCoefficients]
    validity_flags: frozenset = field(default_factory=frozenset)


@dataclass(frozen=True)
class OptimumReport:
    axis: str
    argmax: float
    max_qfi: float
    bracket: tuple
    refined: bool
    flags: frozenset = field(default_factory=frozenset)


def with_axis_value(base: ModelParams, name: str, value: float) -> ModelParams:
    """Copy of ``base`` with one axis variable replaced."""
    value = float(value)
    if name == "nu":
        return dataclasses.replace(base, coupling=DirectNu(value))
    if name == "a":
        return dataclasses.replace(base, kinematics=Acceleration(value))
    if name == "T":
        return dataclasses.replace(base, kinematics=Temperature(value))
    if name == "omega":
        return dataclasses.replace(base, omega=value)
    if name == "theta":
        return dataclasses.replace(base, theta=value)
    if name == "delta":
        if not isinstance(base.coupling, Physical):
            raise InvalidParameter("a delta axis needs physical coupling parameters")
        return dataclasses.replace(base, coupling=dataclasses.replace(base.coupling, delta=value))
    raise InvalidParameter(f"unknown axis {name!r}")


def evaluate(params: ModelParams, coordinates: Optional[dict] = None) -> SweepRecord:
    rho = evolved_state(params)
    coeffs = state_coefficients(params.theta, params.nu, params.omega, params.temperature)
    return SweepRecord(dict(coordinates or {}), qfi_closed(params), state_concurrence(rho),
                       coeffs, params.flags)


def _evaluate_point(base: ModelParams, coords: dict) -> SweepRecord:
    try:
        params = base
        for name, value in coords.items():
            params = with_axis_value(params, name, value)
        return evaluate(params, coords)
    except MetrologyError as exc:
        return SweepRecord(coords, math.nan, math.nan, None,
                           frozenset({f"error:{type(exc).__name__}"}))


def grid_points(axes: Sequence[AxisSpec]) -> list[dict]:
    """Row-major grid: the first axis varies slowest."""
    if not 1 <= len(axes) <= 2:
        raise InvalidParameter(f"a sweep takes one or two axes, got {len(axes)}")
    names = [ax.name for ax in axes]
    if len(set(names)) != len(names):
        raise InvalidParameter(f"duplicate axis names {names}")
    grids = [ax.values() for ax in axes]
    if len(axes) == 1:
        return [{names[0]: float(v)} for v in grids[0]]
    return [{names[0]: float(u), names[1]: float(v)} for u in grids[0] for v in grids[1]]


def sweep(base: ModelParams, axes: Sequence[AxisSpec], workers: int = 1) -> list[SweepRecord]:
    """QFI and concurrence over a one- or two-axis grid.

    Points that fail validation come back as records with NaN values and an
    ``error:`` flag. Output order is grid order regardless of ``workers``.
    """
    points = grid_points(axes)
    if workers <= 1:
        return [_evaluate_point(base, c) for c in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: _evaluate_point(base, c), points))


def golden_section_max(f: Callable[[float], float], lo: float, hi: float,
                       tol: float = 1e-6) -> tuple[float, float]:
    """Maximise a unimodal f on [lo, hi]; returns (x, f(x)) with the bracket narrowed below tol."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def maximize(base: ModelParams, axis: AxisSpec, tol: float = 1e-6) -> OptimumReport:
    """Coarse grid scan followed by golden-section refinement around the best cell."""
    grid = axis.values()
    values = np.array([_evaluate_point(base, {axis.name: float(x)}).qfi for x in grid])
    if np.all(np.isnan(values)):
        raise InvalidParameter(f"no valid points along axis {axis.name}")
    best = int(np.nanargmax(values))
    last = len(grid) - 1
    if best in (0, last):
        lo, hi = (grid[0], grid[1]) if best == 0 else (grid[-2], grid[-1])
        return OptimumReport(axis.name, float(grid[best]), float(values[best]),
                             (float(lo), float(hi)), False, frozenset({FLAG_NO_INTERIOR_MAX}))

    def objective(x):
        q = qfi_closed(with_axis_value(base, axis.name, x))
        return -math.inf if math.isnan(q) else q

    lo, hi = float(grid[best - 1]), float(grid[best + 1])
    x, fx = golden_section_max(objective, lo, hi, tol)
    if fx < values[best]:
        x, fx = float(grid[best]), float(values[best])
    return OptimumReport(axis.name, float(x), float(fx), (lo, hi), True)


# -- figure presets ---------------------------------------------------------

FIG1_NU = AxisSpec("nu", 0.01, 0.2, 20)
FIG1_A = AxisSpec("a", 0.05, 20.0, 60, "log")
FIG2_A = AxisSpec("a", 0.02, 5.0, 60, "log")
FIG3_OMEGA = AxisSpec("omega", 0.7, 15.0, 60, "log")
FIG3_DELTAS = (15.0, 30.0, 45.0)
FIG3_EPSILON = 2 * math.pi * 1e-3
FIG3_KAPPA = 0.02


def figure_base(which: str) -> ModelParams:
    if which == "fig1":
        return ModelParams(math.pi / 4, 1.0, DirectNu(0.1), Acceleration(1.0))
    if which == "fig2":
        return ModelParams(math.pi / 4, 1 / (2 * math.pi), DirectNu(0.1), Acceleration(1.0))
    if which == "fig3":
        return ModelParams(math.pi / 4, 1.0, Physical(FIG3_EPSILON, FIG3_DELTAS[0], FIG3_KAPPA),
                           Acceleration(0.4 * math.pi))
    raise InvalidParameter(f"unknown figure {which!r}; expected fig1, fig2 or fig3")


def figure_axes(which: str) -> list[AxisSpec]:
    if which == "fig1":
        return [FIG1_NU, FIG1_A]
    if which == "fig2":
        return [FIG2_A]
    if which == "fig3":
        return [FIG3_OMEGA]
    raise InvalidParameter(f"unknown figure {which!r}; expected fig1, fig2 or fig3")


def figure_data(which: str, overrides: Optional[dict] = None, *,
                axes: Optional[Sequence[AxisSpec]] = None,
                deltas: Sequence[float] = FIG3_DELTAS, workers: int = 1) -> list[SweepRecord]:
    """Records behind one of the three figures.

    ``overrides`` maps axis names (see AXIS_NAMES) to fixed values applied to
    the preset base point; ``axes`` replaces the preset grid. For fig3 every
    value in ``deltas`` gets its own omega sweep and records carry a ``delta``
    coordinate ahead of ``omega``.
    """
    base = figure_base(which)
    for name, value in (overrides or {}).items():
        base = with_axis_value(base, name, value)
    axes = list(axes) if axes is not None else figure_axes(which)
    if which != "fig3":
        return sweep(base, axes, workers)
    records = []
    for delta in deltas:
        base_d = with_axis_value(base, "delta", delta)
        for rec in sweep(base_d, axes, workers):
            coords = {"delta": float(delta), **rec.coordinates}
            records.append(dataclasses.replace(rec, coordinates=coords))
    return records


def sign_changes(values: Sequence[float], tol: float = FLIP_TOL) -> int:
    """Sign changes in the first differences, ignoring differences below tol."""
    d = np.diff(np.asarray(values, dtype=float))
    d = d[np.abs(d) >= tol]
    return int(np.count_nonzero(np.diff(np.sign(d)) != 0))
