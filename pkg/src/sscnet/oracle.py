"""Numeric ground truth for the structural tests.

Pattern classes are probed two ways: seeded random sampling (supporting
evidence, can refute but not confirm) and exhaustive enumeration over a small
integer grid (authoritative at desk scale, exact integer rank).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from . import kernels
from .errors import BudgetError, ShapeError
from .graph import rank_deficiency_witness
from .network import DIRECT, StructuredNetwork, Witness, assemble, is_controllable
from .node import split
from .pattern import PatternMatrix, block_diag, stack_rows

DEFAULT_BUDGET = 10**6


@dataclass(frozen=True)
class SampleConfig:
    seed: int = 0
    trials: int = 200
    star_range: tuple = (0.1, 2.0)
    quest_zero_probability: float = 0.3
    quest_range: tuple = (0.1, 2.0)
    rank_tolerance: float = 1e-9

    def __post_init__(self):
        lo, hi = self.star_range
        if not 0 < lo <= hi:
            raise ValueError("star_range must be a positive magnitude interval")
        lo, hi = self.quest_range
        if not 0 < lo <= hi:
            raise ValueError("quest_range must be a positive magnitude interval")
        if not 0.0 <= self.quest_zero_probability <= 1.0:
            raise ValueError("quest_zero_probability must lie in [0, 1]")
        if self.rank_tolerance <= 0:
            raise ValueError("rank_tolerance must be positive")


@dataclass(frozen=True)
class EnumerationGrid:
    star_values: tuple = (-2, -1, 1, 2)
    quest_values: tuple = (-1, 0, 1)

    def __post_init__(self):
        if not self.star_values or 0 in self.star_values:
            raise ValueError("star_values must be non-empty and exclude 0")
        if 0 not in self.quest_values:
            raise ValueError("quest_values must contain 0")

    def as_dict(self):
        return {"star_values": list(self.star_values), "quest_values": list(self.quest_values)}


# ---------------------------------------------------------------------------
# sampling


def _draw(codes, rng, cfg: SampleConfig):
    codes = np.asarray(codes)
    out = np.zeros(codes.shape)
    stars = codes == 1
    quests = codes == 2
    ns, nq = int(stars.sum()), int(quests.sum())
    signs = rng.choice([-1.0, 1.0], size=ns)
    out[stars] = signs * rng.uniform(*cfg.star_range, size=ns)
    qv = rng.choice([-1.0, 1.0], size=nq) * rng.uniform(*cfg.quest_range, size=nq)
    qv[rng.random(nq) < cfg.quest_zero_probability] = 0.0
    out[quests] = qv
    return out


def sample(m: PatternMatrix, cfg: SampleConfig, trial: int, stream: int = 0) -> np.ndarray:
    """One realization of ``m``, a pure function of ``(cfg.seed, trial, stream)``."""
    rng = np.random.default_rng([cfg.seed, trial, stream])
    return _draw(m.codes, rng, cfg)


def class_size(m: PatternMatrix, grid: EnumerationGrid) -> int:
    codes = m.codes
    return len(grid.star_values) ** int((codes == 1).sum()) * len(grid.quest_values) ** int((codes == 2).sum())


def _check_budget(m, grid, budget):
    count = class_size(m, grid)
    if count > budget:
        raise BudgetError(count, budget)
    return count


def enumerate_class(
    m: PatternMatrix, grid: EnumerationGrid = EnumerationGrid(), budget: int = DEFAULT_BUDGET
) -> Iterator[np.ndarray]:
    """Every grid realization of ``m``; the last free entry varies fastest."""
    _check_budget(m, grid, budget)
    codes = m.codes
    rows, cols = np.nonzero(codes)
    choices = [grid.star_values if codes[r, c] == 1 else grid.quest_values for r, c in zip(rows, cols)]
    for values in itertools.product(*choices):
        x = np.zeros(m.shape, dtype=np.int64)
        x[rows, cols] = values
        yield x


# ---------------------------------------------------------------------------
# rank and controllability


def numeric_rank(x, tol: float = 1e-9) -> int:
    """Singular values above ``tol`` times the largest one."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        return 0
    s = np.linalg.svd(x, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int((s > tol * s[0]).sum())


def exact_rank(x) -> int:
    """Exact rank of an integer matrix (fraction-free elimination)."""
    return kernels.int_rank(np.asarray(x, dtype=np.int64))


def _check_ab(a, b):
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.asarray(b, dtype=np.float64)
    if b.ndim == 1:
        b = b[:, None]
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"A must be square, got {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise ShapeError(f"B has {b.shape[0]} rows, A has {a.shape[0]}")
    return a, b


def _orth(x, tol_abs):
    if x.shape[1] == 0:
        return x
    u, s, _ = np.linalg.svd(x, full_matrices=False)
    return u[:, s > tol_abs]


def reachable_dimension(a, b, tol: float = 1e-9) -> int:
    """Rank of ``[B, AB, ..., A^(n-1) B]``.

    The Krylov blocks are orthonormalized as they are generated, so the span
    is the same as the raw reachability matrix but powers of ``A`` never
    swamp the tolerance. New directions count when their residual exceeds
    ``tol`` relative to ``max(|A|, |B|)``.
    """
    a, b = _check_ab(a, b)
    n = a.shape[0]
    scale = max(np.linalg.norm(a, 2), np.linalg.norm(b, 2))
    if scale == 0.0:
        return 0
    a = a / scale
    b = b / scale
    basis = _orth(b, tol)
    new = basis
    while new.shape[1] and basis.shape[1] < n:
        w = a @ new
        for _ in range(2):
            w = w - basis @ (basis.T @ w)
        new = _orth(w, tol)
        basis = np.hstack([basis, new])
    return basis.shape[1]


def kalman_controllable(a, b, tol: float = 1e-9) -> bool:
    a, b = _check_ab(a, b)
    return reachable_dimension(a, b, tol) == a.shape[0]


def kalman_matrix(a, b) -> np.ndarray:
    a, b = _check_ab(a, b)
    blocks = [b]
    for _ in range(a.shape[0] - 1):
        blocks.append(a @ blocks[-1])
    return np.hstack(blocks)


def _eigen_clusters(vals, radius):
    clusters = []
    for v in vals:
        for cl in clusters:
            if abs(cl[0] - v) <= radius:
                cl.append(v)
                break
        else:
            clusters.append([v])
    return [(np.mean(cl), len(cl)) for cl in clusters]


def pbh_controllable(a, b, tol: float = 1e-9) -> bool:
    """Popov-Belevitch-Hautus test: ``[A - lambda I, B]`` full row rank at every eigenvalue.

    Nearby eigenvalues are merged and tested at their mean; the rank
    threshold widens to the perturbation expected for a cluster of that size.
    """
    a, b = _check_ab(a, b)
    n = a.shape[0]
    try:
        vals = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise ArithmeticError(f"eigenvalue computation failed: {exc}") from None
    scale = max(np.linalg.norm(a, 2), np.linalg.norm(b, 2), 1e-300)
    eps = np.finfo(float).eps
    for lam, mult in _eigen_clusters(vals, 1e-6 * scale):
        m = np.hstack([a - lam * np.eye(n), b.astype(complex)])
        s = np.linalg.svd(m, compute_uv=False)
        thresh = max(tol, 10 * eps ** (1.0 / mult)) * scale
        if int((s > thresh).sum()) < n:
            return False
    return True


# ---------------------------------------------------------------------------
# enumeration oracles


def _grid_info(m, grid):
    return kernels.grid_table(m.codes, grid.star_values, grid.quest_values)


def grid_full_row_rank(m: PatternMatrix, grid: EnumerationGrid = EnumerationGrid(), budget: int = DEFAULT_BUDGET) -> bool:
    """Whether every grid realization of ``m`` has full row rank (exact arithmetic)."""
    if m.rows > m.cols:
        return False
    _check_budget(m, grid, budget)
    return kernels.scan_grid(m.codes, _grid_info(m, grid), kernels.RANK_BELOW_ROWS) < 0


def falsify_full_row_rank(
    m: PatternMatrix,
    grid: EnumerationGrid = EnumerationGrid(),
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
) -> Optional[np.ndarray]:
    """A realization of ``m`` without full row rank, or None if none was found.

    The structural witness is tried first. Otherwise the grid is scanned
    exhaustively when it fits the budget, else ``budget`` random grid points
    are drawn; None then means inconclusive, not proven.
    """
    cert = rank_deficiency_witness(m)
    if cert is not None:
        return cert.T
    p, q = m.shape
    if p > q:  # pragma: no cover - the witness covers this
        return np.zeros(m.shape, dtype=np.int64)
    info = _grid_info(m, grid)
    if class_size(m, grid) <= budget:
        idx = kernels.scan_grid(m.codes, info, kernels.RANK_BELOW_ROWS)
        return None if idx < 0 else kernels.decode_realization(m.codes, info, idx)
    rng = np.random.default_rng(seed)
    rows, cols, table, radices = info
    for _ in range(budget):
        x = np.zeros(m.shape, dtype=np.int64)
        x[rows, cols] = table[np.arange(rows.size), rng.integers(0, radices)]
        if exact_rank(x) < p:
            return x
    return None


def oracle_independent(
    m: PatternMatrix, n: PatternMatrix, grid: EnumerationGrid = EnumerationGrid(), budget: int = DEFAULT_BUDGET
) -> bool:
    """Whether e1 lies in the column space of every grid realization of ``col(m, n)``.

    That holds exactly when no left null vector of a realization has a
    nonzero first coefficient.
    """
    if m.rows != 1 or m.cols != n.cols:
        raise ShapeError(f"oracle_independent: m is {m.shape}, n is {n.shape}")
    t = stack_rows([m, n])
    _check_budget(t, grid, budget)
    return kernels.scan_grid(t.codes, _grid_info(t, grid), kernels.E1_OUTSIDE_RANGE) < 0


# ---------------------------------------------------------------------------
# networks


def _closed_loop(net, mats):
    a = np.zeros((net.n, net.n))
    b = np.zeros((net.n, net.N))
    c = np.zeros((net.N, net.n))
    for k, (off, (ak, bk, ck)) in enumerate(zip(net.offsets(), mats["nodes"])):
        d = ak.shape[0]
        a[off : off + d, off : off + d] = ak
        b[off : off + d, k] = bk[:, 0]
        c[k, off : off + d] = ck[0]
    return a + b @ mats["W"] @ c, b @ mats["H"]


def sample_network(net: StructuredNetwork, cfg: SampleConfig, trial: int) -> dict:
    """Numeric ``A_k, B_k, C_k, W, H`` drawn from their classes for one trial."""
    rng = np.random.default_rng([cfg.seed, trial])
    nodes = [tuple(_draw(m.codes, rng, cfg) for m in (node.A, node.B, node.C)) for node in net.nodes]
    return {"nodes": nodes, "W": _draw(net.W.codes, rng, cfg), "H": _draw(net.H.codes, rng, cfg)}


def closed_loop(net: StructuredNetwork, mats: dict) -> tuple:
    """``(A + B W C, B H)`` for numeric node and interconnection matrices."""
    return _closed_loop(net, mats)


def network_numeric_check(net: StructuredNetwork, cfg: SampleConfig = SampleConfig(), pbh_limit: int = 12) -> dict:
    """Kalman test on ``cfg.trials`` sampled realizations of the network.

    PBH runs alongside when the state dimension is at most ``pbh_limit``;
    disagreements between the two tests are counted but do not decide a
    trial. A failure refutes a positive structural verdict; all passes are
    supporting evidence only.
    """
    passes = 0
    first_failure = None
    pbh_runs = pbh_disagree = 0
    for trial in range(cfg.trials):
        a, b = _closed_loop(net, sample_network(net, cfg, trial))
        ok = kalman_controllable(a, b, cfg.rank_tolerance)
        if net.n <= pbh_limit:
            pbh_runs += 1
            if pbh_controllable(a, b, cfg.rank_tolerance) != ok:
                pbh_disagree += 1
        if ok:
            passes += 1
        elif first_failure is None:
            first_failure = trial
    return {
        "trials": cfg.trials,
        "passes": passes,
        "failures": cfg.trials - passes,
        "first_failure_seed": None if first_failure is None else [cfg.seed, first_failure],
        "tolerance": cfg.rank_tolerance,
        "grid": {"star_range": list(cfg.star_range), "quest_range": list(cfg.quest_range),
                 "quest_zero_probability": cfg.quest_zero_probability},
        "pbh_runs": pbh_runs,
        "pbh_disagreements": pbh_disagree,
    }


def _split_entry(pa, pw, t):
    """Values ``(a, w)`` in the classes ``pa``, ``pw`` with ``a + w = t``."""
    if pw == 0:
        return t, 0.0
    if pa == 0:
        return 0.0, t
    if pa == 2:
        w = 1.0 if pw == 1 else 0.0
        return t - w, w
    if pw == 2:
        return (t, 0.0) if t != 0 else (1.0, -1.0)
    w = 1.0 if t != 1 else 2.0
    return t - w, w


def witness_realization(net: StructuredNetwork, witness: Optional[Witness] = None) -> dict:
    """Numeric network realizing a rank-deficiency witness.

    Returns numeric node matrices, ``W``, ``H``, the shift ``lam`` (0 unless
    the barred matrix failed) and the left null vector ``z``, such that
    ``z @ [A + BWC - lam I, BH] = 0``. Witnesses from the reduced test
    usually live on the reduced network, so the direct witness is recomputed
    for any witness not produced by the direct test.
    """
    if witness is None or witness.method != DIRECT or witness.pattern.shape != (net.n, net.n + net.m):
        verdict = is_controllable(net, DIRECT)
        witness = verdict.witness
        if witness is None:
            raise ValueError("network is structurally controllable; nothing to replay")
    use_bar = witness.matrix == "Abar"
    n = net.n
    T = np.asarray(witness.T, dtype=np.float64).copy()
    z = np.asarray(witness.z, dtype=np.float64).copy()

    a_pat = block_diag([node.A for node in net.nodes]).codes
    plain = assemble(net, False).codes[:, :n]

    # where each W entry and H row land in the closed loop
    offs = net.offsets()
    in_rows = [off + split(node).input_row - 1 for off, node in zip(offs, net.nodes)]
    out_cols = [off + int(node.C.codes[0].argmax()) for off, node in zip(offs, net.nodes)]
    w_pat = np.zeros((n, n), dtype=np.int8)
    for k in range(net.N):
        for l in range(net.N):
            w_pat[in_rows[k], out_cols[l]] = net.W.codes[k, l]

    lam = 0.0
    if use_bar:
        avoid = {-T[i, i] for i in range(n) if plain[i, i] == 1}
        lam = next(v for v in itertools.count(1) if v not in avoid)
        for i in range(n):
            if plain[i, i] == 0:
                s = -lam / T[i, i]
                T[i] *= s
                z[i] /= s
        target = T[:, :n] + lam * np.eye(n)
    else:
        target = T[:, :n]

    a_num = np.zeros((n, n))
    w_full = np.zeros((n, n))
    for r in range(n):
        for c in range(n):
            a_num[r, c], w_full[r, c] = _split_entry(a_pat[r, c], w_pat[r, c], target[r, c])

    nodes = []
    for off, node in zip(offs, net.nodes):
        d = node.n
        nodes.append((a_num[off : off + d, off : off + d], node.B.codes.astype(float), node.C.codes.astype(float)))
    W = np.array([[w_full[in_rows[k], out_cols[l]] for l in range(net.N)] for k in range(net.N)])
    H = T[in_rows, n:]
    return {"nodes": nodes, "W": W, "H": H, "lam": lam, "z": z, "matrix": witness.matrix}


def replay_witness(net: StructuredNetwork, witness: Optional[Witness] = None, tol: float = 1e-9) -> dict:
    """Build the witness realization and run the Kalman test on it."""
    mats = witness_realization(net, witness)
    a, b = _closed_loop(net, mats)
    residual = mats["z"] @ np.hstack([a - mats["lam"] * np.eye(net.n), b])
    return {
        "kalman_controllable": kalman_controllable(a, b, tol),
        "residual": float(np.abs(residual).max()),
        "lam": mats["lam"],
        "matrix": mats["matrix"],
        "realization": mats,
    }
