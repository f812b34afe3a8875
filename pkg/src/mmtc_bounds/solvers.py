"""Numerical solution of the four SNR / Eb/N0 minimisation tasks.

Every task reduces to the same inner problem: at a fixed blocklength n,
find the SNR at which the normal-approximation error probability equals a
target that the ALOHA layer dictates. The outer problem scans n
exhaustively over its feasible range; task 4 additionally searches the
transmission intensity G on a coarse grid followed by golden-section
refinement.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import aloha
from .errors import DomainError, InfeasibleSpecError, NoSolutionError
from .fbl import ebn0_from_snr_retx, pe_normal_approx, snr_from_ebn0_retx, snr_to_ebn0, ebn0_to_snr, to_db

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class Task(enum.IntEnum):
    T1 = 1  # min SNR, no retransmissions
    T2 = 2  # min Eb/N0, no retransmissions
    T3 = 3  # min SNR, retransmissions, G = 1
    T4 = 4  # min Eb/N0, retransmissions, G free

    @property
    def retx(self) -> bool:
        return self in (Task.T3, Task.T4)

    @property
    def minimizes_snr(self) -> bool:
        return self in (Task.T1, Task.T3)


@dataclass(frozen=True)
class TaskSpec:
    task: Task
    k: int
    rho: float
    pd: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "task", Task(self.task))
        if self.k < 1:
            raise DomainError(f"k must be >= 1, got {self.k}")
        if not self.rho > 0:
            raise DomainError(f"rho must be positive, got {self.rho}")
        if self.task.retx:
            if self.pd is not None:
                raise DomainError(f"task {int(self.task)} does not take a delivery ratio")
        else:
            if self.pd is None:
                raise DomainError(f"task {int(self.task)} requires a delivery ratio pd")
            if not 0.0 < self.pd < 1.0:
                raise DomainError(f"pd must lie in (0, 1), got {self.pd}")


@dataclass(frozen=True)
class SolverOptions:
    snr_lo: float = 1e-9
    snr_hi_init: float = 1.0
    rel_tol: float = 1e-9
    g_grid_step: float = 0.01
    g_refine_tol: float = 1e-4
    max_bracket_doublings: int = 60
    max_bisections: int = 400

    def __post_init__(self):
        if not 0 < self.snr_lo < self.snr_hi_init:
            raise DomainError("need 0 < snr_lo < snr_hi_init")
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")
        if not 0 < self.g_grid_step <= 1:
            raise DomainError("g_grid_step must lie in (0, 1]")


@dataclass(frozen=True)
class Solution:
    task: Task
    k: int
    rho: float
    pd: float | None
    n_opt: int
    g_opt: float
    snr: float
    ebn0: float
    pe_achieved: float
    pe_target: float
    feasible_range: tuple[int, int]
    snr_db: float = field(init=False)
    ebn0_db: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "snr_db", to_db(self.snr))
        object.__setattr__(self, "ebn0_db", to_db(self.ebn0))


def solve_snr_batch(k, n, pe_target, opts: SolverOptions | None = None) -> np.ndarray:
    """Vectorised inversion of the error probability in SNR.

    For each (n, pe_target) pair returns the SNR whose error probability
    matches the target to relative accuracy ``opts.rel_tol``; NaN where the
    bracket [snr_lo, snr_hi_init * 2**max_bracket_doublings] does not contain
    a crossing.
    """
    opts = opts or SolverOptions()
    n = np.asarray(n, dtype=float)
    target = np.broadcast_to(np.asarray(pe_target, dtype=float), n.shape).copy()
    if np.any((target <= 0) | (target >= 1)):
        raise DomainError("pe_target must lie in (0, 1)")

    lo = np.full(n.shape, opts.snr_lo)
    hi = np.full(n.shape, opts.snr_hi_init)
    ok = pe_normal_approx(k, n, lo) > target
    pending = ok & ~(pe_normal_approx(k, n, hi) < target)
    for _ in range(opts.max_bracket_doublings):
        if not pending.any():
            break
        lo = np.where(pending, hi, lo)
        hi = np.where(pending, 2.0 * hi, hi)
        pending &= ~(pe_normal_approx(k, n, hi) < target)
    ok &= ~pending

    # bisect at the geometric midpoint: the bracket can span many decades
    snr = np.sqrt(lo * hi)
    active = ok.copy()
    for _ in range(opts.max_bisections):
        snr = np.where(active, np.sqrt(lo * hi), snr)
        pe = pe_normal_approx(k, n, snr)
        active &= np.abs(pe - target) > opts.rel_tol * target
        active &= hi > lo * (1.0 + 4e-16)
        if not active.any():
            break
        above = pe > target
        lo = np.where(active & above, snr, lo)
        hi = np.where(active & ~above, snr, hi)
    return np.where(ok, snr, np.nan)


def solve_snr_for_pe(k, n, pe_target, opts: SolverOptions | None = None) -> float:
    """Linear SNR at which a (k, n) code reaches decoding error probability ``pe_target``."""
    if not 0.0 < pe_target < 1.0:
        raise DomainError(f"pe_target must lie in (0, 1), got {pe_target}")
    snr = float(solve_snr_batch(k, np.array([n]), pe_target, opts)[0])
    if math.isnan(snr):
        raise NoSolutionError(f"no SNR bracket for k={k}, n={n}, pe_target={pe_target}")
    return snr


def _argmin_smallest(values: np.ndarray, rel_tol: float) -> int:
    """Index of the minimum, preferring the earliest entry within rel_tol of it."""
    best = np.nanmin(values)
    return int(np.flatnonzero(values <= best * (1.0 + rel_tol))[0])


def _scan(k, rho, targets_for, n_range, opts):
    ns = np.arange(n_range[0], n_range[1] + 1)
    targets = targets_for(ns)
    snr = solve_snr_batch(k, ns, targets, opts)
    good = ~np.isnan(snr)
    if not good.any():
        raise InfeasibleSpecError(f"no blocklength in {n_range} reaches its target within the SNR bracket")
    return ns[good], snr[good], targets[good]


def _make_solution(spec, n, g, snr, target, n_range, ebn0=None):
    if spec.task.retx:
        ebn0 = ebn0_from_snr_retx(snr, spec.rho, g) if ebn0 is None else ebn0
    else:
        ebn0 = snr_to_ebn0(n, spec.k, snr)
    return Solution(
        task=spec.task, k=spec.k, rho=spec.rho, pd=spec.pd, n_opt=int(n), g_opt=float(g),
        snr=float(snr), ebn0=float(ebn0), pe_achieved=pe_normal_approx(spec.k, n, snr),
        pe_target=float(target), feasible_range=n_range,
    )


def _solve_no_retx(spec: TaskSpec, opts: SolverOptions) -> Solution:
    n_range = aloha.feasible_n_range(aloha.NO_RETX, spec.k, spec.rho, pd=spec.pd)
    ns, snr, targets = _scan(
        spec.k, spec.rho, lambda n: aloha.pe_target_no_retx(spec.k, spec.rho, spec.pd, n), n_range, opts
    )
    objective = snr if spec.task.minimizes_snr else ns * snr / (2.0 * spec.k)
    i = _argmin_smallest(objective, opts.rel_tol)
    return _make_solution(spec, ns[i], 1.0, snr[i], targets[i], n_range)


def _best_at_g(k, rho, g, opts):
    """(ebn0, n, snr, target, n_range) minimising Eb/N0 at fixed g, or None if infeasible."""
    try:
        n_range = aloha.feasible_n_range(aloha.RETX, k, rho, g=g)
        ns, snr, targets = _scan(k, rho, lambda n: aloha.pe_target_retx(k, rho, g, n), n_range, opts)
    except InfeasibleSpecError:
        return None
    ebn0 = g * snr / (2.0 * rho)
    i = _argmin_smallest(ebn0, opts.rel_tol)
    return float(ebn0[i]), int(ns[i]), float(snr[i]), float(targets[i]), n_range


def task1_min_snr(spec: TaskSpec, opts: SolverOptions | None = None) -> Solution:
    _expect(spec, Task.T1)
    return _solve_no_retx(spec, opts or SolverOptions())


def task2_min_ebn0(spec: TaskSpec, opts: SolverOptions | None = None) -> Solution:
    _expect(spec, Task.T2)
    return _solve_no_retx(spec, opts or SolverOptions())


def task3_min_snr(spec: TaskSpec, opts: SolverOptions | None = None) -> Solution:
    _expect(spec, Task.T3)
    opts = opts or SolverOptions()
    g = aloha.optimal_g()
    n_range = aloha.feasible_n_range(aloha.RETX, spec.k, spec.rho, g=g)
    ns, snr, targets = _scan(spec.k, spec.rho, lambda n: aloha.pe_target_retx(spec.k, spec.rho, g, n), n_range, opts)
    i = _argmin_smallest(snr, opts.rel_tol)
    return _make_solution(spec, ns[i], g, snr[i], targets[i], n_range)


def golden_section_min(f, a, b, tol):
    """Minimise a unimodal scalar function on [a, b]; returns (x, f(x))."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def g_grid(step: float) -> np.ndarray:
    """Grid step, 2*step, ..., ending exactly at 1."""
    m = int(round(1.0 / step))
    grid = np.round(np.arange(1, m + 1) * step, 12)
    if grid[-1] != 1.0:
        grid = np.append(grid[grid < 1.0], 1.0)
    return grid


def task4_min_ebn0(spec: TaskSpec, opts: SolverOptions | None = None, g_fixed: float | None = None) -> Solution:
    """Minimise Eb/N0 jointly over blocklength and transmission intensity.

    ``g_fixed`` pins the intensity and only scans the blocklength.
    """
    _expect(spec, Task.T4)
    opts = opts or SolverOptions()
    k, rho = spec.k, spec.rho

    if g_fixed is not None:
        best = _best_at_g(k, rho, g_fixed, opts)
        if best is None:
            raise InfeasibleSpecError(f"task 4 infeasible at g={g_fixed} (k={k}, rho={rho})")
        g_opt = g_fixed
    else:
        grid = g_grid(opts.g_grid_step)
        results = [_best_at_g(k, rho, g, opts) for g in grid]
        values = np.array([np.inf if r is None else r[0] for r in results])
        if not np.isfinite(values).any():
            raise InfeasibleSpecError(f"no (n, g) pair is feasible for task 4 (k={k}, rho={rho})")
        i = _argmin_smallest(values, opts.rel_tol)
        g_opt, best = float(grid[i]), results[i]

        def objective(g):
            r = _best_at_g(k, rho, g, opts)
            return math.inf if r is None else r[0]

        a = grid[i - 1] if i > 0 else opts.g_refine_tol
        b = grid[i + 1] if i + 1 < len(grid) else 1.0
        g_ref, val_ref = golden_section_min(objective, a, b, opts.g_refine_tol)
        if val_ref < best[0]:
            g_opt, best = float(g_ref), _best_at_g(k, rho, g_ref, opts)

    ebn0, n, snr, target, n_range = best
    return _make_solution(spec, n, g_opt, snr, target, n_range, ebn0=ebn0)


_SOLVERS = {Task.T1: task1_min_snr, Task.T2: task2_min_ebn0, Task.T3: task3_min_snr, Task.T4: task4_min_ebn0}


def solve(spec: TaskSpec, opts: SolverOptions | None = None) -> Solution:
    return _SOLVERS[spec.task](spec, opts)


def convert_solution(sol: Solution) -> tuple[float, float]:
    """(SNR dB, Eb/N0 dB) with the non-minimised quantity recomputed from the minimised one."""
    if sol.task.retx:
        if sol.task.minimizes_snr:
            snr, ebn0 = sol.snr, ebn0_from_snr_retx(sol.snr, sol.rho, sol.g_opt)
        else:
            snr, ebn0 = snr_from_ebn0_retx(sol.ebn0, sol.rho, sol.g_opt), sol.ebn0
    elif sol.task.minimizes_snr:
        snr, ebn0 = sol.snr, snr_to_ebn0(sol.n_opt, sol.k, sol.snr)
    else:
        snr, ebn0 = ebn0_to_snr(sol.n_opt, sol.k, sol.ebn0), sol.ebn0
    return to_db(snr), to_db(ebn0)


def _expect(spec: TaskSpec, task: Task):
    if spec.task != task:
        raise DomainError(f"expected a task {int(task)} spec, got task {int(spec.task)}")
