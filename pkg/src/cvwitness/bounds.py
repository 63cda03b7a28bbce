"""Separability bounds on the second-moment witness value G.

The central quantity is the partition bound B_I(X, P): the maximum of the
quantumness bound over all witnesses that agree with (X, P) on within-block
entries while the cross-block entries run free. Any state separable with
respect to partition I satisfies G >= B_I(X, P), so a measured G below the
bound certifies entanglement across I.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import product
from typing import NamedTuple

import numpy as np

from .linalg import (
    PD_FLOOR,
    PSD_TOL,
    NotPSD,
    SingularGradient,
    quantum_bound,
    quantum_bound_gradient,
    symmetrize,
)
from .partitions import (
    Partition,
    free_mask,
    symmetric_bipartition_representatives,
)
from .states import CVState

# An ascent certificate may trail the closed-form block-diagonal one by float
# noise on a flat optimal face; within this slack the ascent one is preferred.
_CERT_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class WitnessPair:
    """Symmetric PSD pair (X, P) defining G = tr(X gxx) + tr(P gpp)."""

    X: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        X = symmetrize(np.asarray(self.X, dtype=float))
        P = symmetrize(np.asarray(self.P, dtype=float))
        if X.shape != P.shape:
            raise ValueError(f"X and P shapes differ: {X.shape} vs {P.shape}")
        for name, M in (("X", X), ("P", P)):
            low = float(np.linalg.eigvalsh(M)[0])
            if low < -PSD_TOL:
                raise NotPSD(low, f"witness {name}")
        X.flags.writeable = False
        P.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "P", P)

    @property
    def n(self) -> int:
        return self.X.shape[0]


@dataclass(frozen=True, eq=False)
class BoundResult:
    """Outcome of the inner maximization: value and the witness attaining it."""

    value: float
    certificate_X: np.ndarray
    certificate_P: np.ndarray
    iterations: int
    converged: bool


class Table1Row(NamedTuple):
    q: float
    a: float | None
    b: float | None
    f: float


def evaluate_G(w: WitnessPair, s: CVState) -> float:
    """G = tr(X gamma_xx) + tr(P gamma_pp)."""
    if w.n != s.n:
        raise ValueError(f"witness is {w.n}-mode but state is {s.n}-mode")
    return float(np.sum(w.X * s.gamma_xx) + np.sum(w.P * s.gamma_pp))


def _min_eig(A: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(A)[0])


def _feasible_start(M: np.ndarray, mask: np.ndarray) -> np.ndarray | None:
    """Strictly PD start agreeing with M off the mask, shrinking freed entries
    toward zero if needed; None when the diagonal blocks are rank deficient
    (then no strictly PD point with those fixed entries exists at all)."""
    t = 1.0
    for _ in range(60):
        cand = np.where(mask, t * M, M)
        if _min_eig(cand) > PD_FLOOR:
            return cand
        t *= 0.5
    cand = np.where(mask, 0.0, M)
    if _min_eig(cand) > PD_FLOOR:
        return cand
    return None


def separability_bound(
    w: WitnessPair,
    p: Partition,
    *,
    max_iter: int = 10000,
    grad_tol: float = 1e-9,
    value_tol: float = 1e-12,
    initial_step: float = 1.0,
) -> BoundResult:
    """Maximize the quantumness bound over the entries freed by partition p.

    Projected gradient ascent with Armijo backtracking; the objective is
    concave in the freed entries, so any stall is at the global maximum or on
    the PSD boundary (the supremum is then approached from inside). Zeroing
    the freed entries is itself always optimal, so that certificate backstops
    the ascent: when the witness admits no strictly PD interior point (rank
    deficient diagonal blocks) it is returned outright with converged=True.
    The reported certificates keep every non-freed entry of (X, P) exactly.
    """
    if w.n != p.n:
        raise ValueError(f"witness is {w.n}-mode but partition is over {p.n}")
    mask = free_mask(p).mask
    if not mask.any():
        return BoundResult(quantum_bound(w.X, w.P), w.X, w.P, 0, True)

    # Zeroing the freed entries always attains the supremum (the bound splits
    # into a sum of per-block bounds); kept as the guaranteed certificate.
    X0 = np.where(mask, 0.0, w.X)
    P0 = np.where(mask, 0.0, w.P)
    block_value = quantum_bound(X0, P0)

    Xc = _feasible_start(w.X, mask)
    Pc = _feasible_start(w.P, mask)
    if Xc is None or Pc is None:
        # Empty PD interior (e.g. rank-one witnesses): the ascent cannot move,
        # so return the closed-form optimum directly.
        X0.flags.writeable = False
        P0.flags.writeable = False
        return BoundResult(block_value, X0, P0, 0, True)
    value = quantum_bound(Xc, Pc)
    recent: list[float] = []  # last few accepted improvements
    streak = 0
    converged = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        try:
            dX, dP = quantum_bound_gradient(Xc, Pc)
        except SingularGradient:
            converged = _cauchy_tail(recent, value)
            break
        gX = np.where(mask, dX, 0.0)
        gP = np.where(mask, dP, 0.0)
        gnorm2 = float(np.sum(gX * gX) + np.sum(gP * gP))
        if np.sqrt(gnorm2) < grad_tol:
            converged = True
            break
        step = initial_step
        accepted = False
        while step > 1e-14:
            Xn = Xc + step * gX
            Pn = Pc + step * gP
            if _min_eig(Xn) <= PD_FLOOR or _min_eig(Pn) <= PD_FLOOR:
                step *= 0.5
                continue
            vn = quantum_bound(Xn, Pn)
            if vn >= value + 1e-4 * step * gnorm2:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            # Stall on the PSD boundary: the supremum is approached from the
            # interior; accept once the recent improvements have gone Cauchy.
            converged = _cauchy_tail(recent, value)
            break
        gain = vn - value
        recent.append(gain)
        if len(recent) > 5:
            recent.pop(0)
        streak = streak + 1 if gain <= value_tol * max(1.0, abs(vn)) else 0
        Xc, Pc, value = Xn, Pn, vn
        if streak >= 5:
            converged = True
            break
    else:
        converged = False

    # The ascent only ever touched freed entries, so its iterate is already an
    # exact-certificate candidate; fall back to the block-diagonal optimum if
    # the ascent was left behind (stall far from the flat optimal face).
    if value >= block_value - _CERT_SLACK * max(1.0, abs(block_value)):
        Xc.flags.writeable = False
        Pc.flags.writeable = False
        return BoundResult(value, Xc, Pc, iterations, converged)
    X0.flags.writeable = False
    P0.flags.writeable = False
    return BoundResult(block_value, X0, P0, iterations, True)


def _cauchy_tail(recent: list[float], value: float) -> bool:
    if not recent:
        return True
    return max(recent) <= 1e-6 * max(1.0, abs(value))


def rank_one_bound(h: np.ndarray, g: np.ndarray, p: Partition) -> float:
    """Partition bound for the rank-one pair X=hh^T, P=gg^T: sum over blocks
    of |sum_{i in block} h_i g_i|; never below |<h,g>|."""
    h = np.asarray(h, dtype=float).ravel()
    g = np.asarray(g, dtype=float).ravel()
    if h.shape != g.shape:
        raise ValueError(f"h and g lengths differ: {h.size} vs {g.size}")
    if h.size != p.n:
        raise ValueError(f"vectors have {h.size} modes but partition is over {p.n}")
    prod = h * g
    return float(sum(abs(prod[[i - 1 for i in block]].sum()) for block in p.blocks))


def lmi_separability_test(
    s: CVState, p: Partition
) -> tuple[bool, float, tuple[int, ...]]:
    """Sign-matrix separability test.

    A state separable w.r.t. p keeps [[gxx, E/2], [E/2, gpp]] PSD for every
    diagonal sign matrix E constant on blocks. Enumerates the 2^(k-1)
    patterns (global sign is irrelevant; the first block is fixed to +1) and
    returns (violated, most negative eigenvalue found, per-mode worst pattern).
    """
    if s.n != p.n:
        raise ValueError(f"state is {s.n}-mode but partition is over {p.n}")
    n = s.n
    M = np.zeros((2 * n, 2 * n))
    M[:n, :n] = s.gamma_xx
    M[n:, n:] = s.gamma_pp
    lowest = np.inf
    worst: tuple[int, ...] = (1,) * n
    for tail in product((1, -1), repeat=p.k - 1):
        eps = np.empty(n)
        for block, sign in zip(p.blocks, (1,) + tail):
            for i in block:
                eps[i - 1] = sign
        M[:n, n:] = np.diag(eps / 2.0)
        M[n:, :n] = M[:n, n:]
        low = _min_eig(M)
        if low < lowest:
            lowest = low
            worst = tuple(int(e) for e in eps)
    return lowest < -PSD_TOL, float(lowest), worst


def analytic_biseparable_bound(n: int) -> float:
    """Closed-form lower bound on G for biseparable n-mode states (n >= 3)."""
    if n < 3:
        raise ValueError(f"analytic biseparable bound needs n >= 3, got {n}")
    q = (n - 1) * np.sqrt(n * (n - 2))
    return float(q + 4 * (n - 1) / (np.sqrt(n) * (np.sqrt(2 * n - 2) + np.sqrt(n - 2))))


def symmetric_witness(n: int) -> WitnessPair:
    """Permutation-symmetric witness: X = (n-2)I + ones, P = nI - ones."""
    if n < 2:
        raise ValueError(f"symmetric witness needs n >= 2, got {n}")
    J = np.ones((n, n))
    return WitnessPair((n - 2) * np.eye(n) + J, n * np.eye(n) - J)


def table1_bounds(n: int) -> Table1Row:
    """Benchmark bounds for the symmetric witness.

    q: quantumness bound; a: analytic biseparable bound (n >= 3);
    b: best biseparable bound over bipartition representatives (n >= 3);
    f: full-separability bound, equal to n(n-1) up to ascent tolerance.
    """
    if not 2 <= n <= 8:
        raise ValueError(f"table covers 2 <= n <= 8, got {n}")
    w = symmetric_witness(n)
    q = quantum_bound(w.X, w.P)
    a = analytic_biseparable_bound(n) if n >= 3 else None
    b = None
    stalled = []
    if n >= 3:
        results = [
            separability_bound(w, rep) for rep in symmetric_bipartition_representatives(n)
        ]
        b = min(r.value for r in results)
        stalled += [r for r in results if not r.converged]
    f_result = separability_bound(w, Partition.singletons(n))
    stalled += [] if f_result.converged else [f_result]
    if stalled:
        warnings.warn(f"{len(stalled)} ascent(s) hit the iteration cap for n={n}")
    return Table1Row(float(q), a, b, float(f_result.value))
