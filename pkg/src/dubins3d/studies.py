"""Solution-space studies: parameter sweeps, seed sensitivity, gradient use.

All studies run the damped-Newton machinery in cross-problem batches (one
array element per grid cell or random case) so full sweeps stay fast, and all
are deterministic for fixed inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .batch import RayBatch, eval_ahead, newton
from .geom import EPS_ZERO
from .residual import ALL_TYPES, SolutionType
from .scenarios import Scenario
from .solver import RESIDUAL_TOL_SCALE

SWEEP_MODES = ("planar", "nonplanar")
# Swept axis ranges: positions on [-6, 6] (inclusive, symmetric about 0) and
# angles on [0, 2 pi) (half-open).
POSITION_RANGE = 6.0


@dataclass(frozen=True)
class SweepSpec:
    """A 2D slice of the 3-variable end-configuration family.

    planar mode: start at the origin heading +z, goal at [x, 0, z] heading
    [-sin(theta), 0, cos(theta)] (theta = 0 aligns the headings).
    nonplanar mode: same start, goal heading [cos(phi), sin(phi), 0].
    One of the three variables (x, z, angle) is fixed; the other two sweep.
    """

    mode: str
    fixed: tuple[str, float]
    steps: int = 61
    robust_seeds: bool = False

    def __post_init__(self) -> None:
        if self.mode not in SWEEP_MODES:
            raise ValueError(f"mode must be one of {SWEEP_MODES}")
        if self.fixed[0] not in ("x", "z", "angle"):
            raise ValueError("fixed variable must be x, z, or angle")
        if self.steps < 2:
            raise ValueError("steps must be at least 2")

    @property
    def swept(self) -> tuple[str, str]:
        return tuple(v for v in ("x", "z", "angle") if v != self.fixed[0])  # type: ignore[return-value]


def axis_values(name: str, steps: int) -> np.ndarray:
    """Grid values for one axis.

    Positions are built as (k - mid) * step so that mirrored indices carry
    exactly negated coordinates; angles tile [0, 2 pi) half-open.
    """
    if name == "angle":
        return np.arange(steps) * (2.0 * math.pi / steps)
    mid = (steps - 1) // 2
    step = 2.0 * POSITION_RANGE / (steps - 1)
    return (np.arange(steps) - mid) * step


def _goal_direction(mode: str, angle: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if mode == "planar":
        return (-np.sin(angle), np.zeros_like(angle), np.cos(angle))
    return (np.cos(angle), np.sin(angle), np.zeros_like(angle))


@dataclass
class SweepResult:
    spec: SweepSpec
    axis_names: tuple[str, str]
    axis_a: np.ndarray
    axis_b: np.ndarray
    counts: np.ndarray  # total valid roots per cell
    counts_regular: np.ndarray
    counts_switched: np.ndarray
    collinear: np.ndarray

    def rows(self):
        """Row tuples (a, b, count, count_regular, count_switched, collinear)
        in deterministic cell order."""
        for i, a in enumerate(self.axis_a):
            for j, b in enumerate(self.axis_b):
                yield (
                    float(a),
                    float(b),
                    int(self.counts[i, j]),
                    int(self.counts_regular[i, j]),
                    int(self.counts_switched[i, j]),
                    int(self.collinear[i, j]),
                )


def run_sweep(spec: SweepSpec, radius: float = 1.0, residual_tol: float | None = None) -> SweepResult:
    """Count directionally valid roots for every cell of the slice.

    Cells are solved from the single seed (0, 0) unless robust_seeds is set,
    in which case each cell also gets a 9 x 9 grid of seeds spanning its own
    scale.  Collinear cells (goal on the start axis with matching heading)
    cannot be expressed in the two-offset parametrization; they are flagged
    and given count 1 when the straight connection itself is a valid path.
    """
    tol = residual_tol if residual_tol is not None else RESIDUAL_TOL_SCALE * radius
    name_a, name_b = spec.swept
    axis_a = axis_values(name_a, spec.steps)
    axis_b = axis_values(name_b, spec.steps)
    grid_a, grid_b = np.meshgrid(axis_a, axis_b, indexing="ij")
    values = {spec.fixed[0]: np.full(grid_a.size, float(spec.fixed[1]))}
    values[name_a] = grid_a.ravel()
    values[name_b] = grid_b.ravel()

    x = values["x"]
    z = values["z"]
    angle = values["angle"]
    n = x.size
    goal_dir = _goal_direction(spec.mode, angle)
    rb = RayBatch.build(
        (0.0, 0.0, 0.0),
        (0.0, 0.0, 1.0),
        (x, np.zeros(n), z),
        goal_dir,
        radius,
        n,
    )

    # collinear cells: goal heading parallel to +z and goal on the z axis;
    # the straight connection is itself a path only for a forward-aligned goal
    dir_cross = np.hypot(goal_dir[0], goal_dir[1])  # |v_f x z-hat| for unit v_f
    collinear = (dir_cross <= EPS_ZERO) & (np.abs(x) <= EPS_ZERO)
    straight_ok = collinear & (goal_dir[2] > 0) & (z >= -EPS_ZERO)

    counts_reg = np.zeros(n, np.int64)
    counts_sw = np.zeros(n, np.int64)
    chord = np.sqrt(x * x + z * z)
    span = chord + 4.0 * radius
    if spec.robust_seeds:
        fracs = np.linspace(-1.0, 1.0, 9)
        seed_fracs = [(0.0, 0.0)] + [(a, b) for a in fracs for b in fracs]
    else:
        seed_fracs = [(0.0, 0.0)]
    for stype in ALL_TYPES:
        found = np.zeros(n, bool)
        root_hi = np.full(n, np.nan)
        root_hf = np.full(n, np.nan)
        roots_per_cell: list[list[tuple[float, float]]] | None = [[] for _ in range(n)] if spec.robust_seeds else None
        for fa, fb in seed_fracs:
            res = newton(rb, stype, fa * span, fb * span, tol, max_iters=60, h_limit=max(1e3, 100.0 * float(span.max())))
            if roots_per_cell is None:
                newly = res.converged & ~found
                root_hi[newly] = res.h_i[newly]
                root_hf[newly] = res.h_f[newly]
                found |= newly
            else:
                for q in np.flatnonzero(res.converged):
                    cell = roots_per_cell[q]
                    a, b = float(res.h_i[q]), float(res.h_f[q])
                    if all(max(abs(a - c), abs(b - d)) >= 1e-6 for c, d in cell):
                        cell.append((a, b))
        if roots_per_cell is None:
            ahead = eval_ahead(rb, stype, root_hi, root_hf)
            valid = found & np.isfinite(ahead)
            if stype.switched:
                valid &= ahead <= EPS_ZERO
            else:
                valid &= ahead >= -EPS_ZERO
            if stype.switched:
                counts_sw += valid
            else:
                counts_reg += valid
        else:
            for q, cell in enumerate(roots_per_cell):
                for a, b in cell:
                    ahead = eval_ahead(rb.take(np.array([q])), stype, np.array([a]), np.array([b]))[0]
                    if not np.isfinite(ahead):
                        continue
                    ok = ahead <= EPS_ZERO if stype.switched else ahead >= -EPS_ZERO
                    if ok:
                        if stype.switched:
                            counts_sw[q] += 1
                        else:
                            counts_reg[q] += 1

    counts_reg[collinear] = 0
    counts_sw[collinear] = 0
    total = counts_reg + counts_sw
    total[straight_ok] = 1
    shape = (spec.steps, spec.steps)
    return SweepResult(
        spec,
        (name_a, name_b),
        axis_a,
        axis_b,
        total.reshape(shape),
        counts_reg.reshape(shape),
        counts_sw.reshape(shape),
        collinear.reshape(shape).astype(np.int64),
    )


@dataclass(frozen=True)
class SeedStudyRow:
    seed_h_i: float
    seed_h_f: float
    type_id: int
    converged: bool
    root_h_i: float | None
    root_h_f: float | None


def run_seed_study(
    scenario: Scenario,
    half_width: float,
    resolution: int,
    type_ids: tuple[int, ...] = tuple(range(1, 9)),
) -> list[SeedStudyRow]:
    """Map every seed on a grid to the root it converges to, per type."""
    inst = scenario.instance
    opts = scenario.options
    tol = opts.resolved_tol(inst)
    vals = np.linspace(-half_width, half_width, resolution)
    a, b = np.meshgrid(vals, vals, indexing="ij")
    hi0 = a.ravel()
    hf0 = b.ravel()
    rb = RayBatch.build(
        inst.start.position.as_tuple(),
        inst.start.direction.as_tuple(),
        inst.goal.position.as_tuple(),
        inst.goal.direction.as_tuple(),
        inst.radius,
        hi0.size,
    )
    rows: list[SeedStudyRow] = []
    for tid in type_ids:
        stype = SolutionType.from_id(tid)
        res = newton(rb, stype, hi0, hf0, tol, max_iters=opts.max_iters, use_gradient=opts.use_gradient)
        for q in range(hi0.size):
            conv = bool(res.converged[q])
            rows.append(
                SeedStudyRow(
                    float(hi0[q]),
                    float(hf0[q]),
                    tid,
                    conv,
                    float(res.h_i[q]) if conv else None,
                    float(res.h_f[q]) if conv else None,
                )
            )
    return rows


@dataclass(frozen=True)
class GradientStudyRow:
    case: int
    distance: float
    direction_angle: float
    n_with_gradient: int
    n_without_gradient: int


def run_gradient_study(n_cases: int, rng_seed: int, radius: float = 1.0) -> list[GradientStudyRow]:
    """Valid-root counts with analytic versus finite-difference Jacobians.

    Each case fixes the start at the origin heading +z and draws a goal
    position uniformly in [-6, 6]^3, a goal heading uniformly on the sphere,
    and one random seed scaled to the case; both solver modes run from that
    same seed.  Deterministic for a fixed rng_seed.
    """
    if n_cases < 1:
        raise ValueError("n_cases must be at least 1")
    rng = np.random.default_rng(rng_seed)
    xf = rng.uniform(-POSITION_RANGE, POSITION_RANGE, size=(n_cases, 3))
    vf = rng.normal(size=(n_cases, 3))
    vf /= np.linalg.norm(vf, axis=1, keepdims=True)
    chord = np.linalg.norm(xf, axis=1)
    span = chord + 4.0 * radius
    seed_frac = rng.uniform(-1.0, 1.0, size=(n_cases, 2))
    hi0 = seed_frac[:, 0] * span
    hf0 = seed_frac[:, 1] * span

    tol = RESIDUAL_TOL_SCALE * radius
    rb = RayBatch.build(
        (0.0, 0.0, 0.0),
        (0.0, 0.0, 1.0),
        (xf[:, 0], xf[:, 1], xf[:, 2]),
        (vf[:, 0], vf[:, 1], vf[:, 2]),
        radius,
        n_cases,
    )
    counts = {True: np.zeros(n_cases, np.int64), False: np.zeros(n_cases, np.int64)}
    h_limit = max(1e3, 100.0 * float(span.max()))
    for stype in ALL_TYPES:
        for use_gradient in (True, False):
            res = newton(rb, stype, hi0, hf0, tol, max_iters=100, use_gradient=use_gradient, h_limit=h_limit)
            ahead = eval_ahead(rb, stype, res.h_i, res.h_f)
            valid = res.converged & np.isfinite(ahead)
            if stype.switched:
                valid &= ahead <= EPS_ZERO
            else:
                valid &= ahead >= -EPS_ZERO
            counts[use_gradient] += valid
    angles = np.arccos(np.clip(vf[:, 2], -1.0, 1.0))  # angle from the +z start heading
    return [
        GradientStudyRow(k, float(chord[k]), float(angles[k]), int(counts[True][k]), int(counts[False][k]))
        for k in range(n_cases)
    ]
