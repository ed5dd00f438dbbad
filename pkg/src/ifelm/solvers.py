"""Incremental output-weight solvers: add one hidden node, update W.

Five interchangeable update rules over the regularized least-squares
problem W = Y H^T (H H^T + k0sq I)^-1:

* BASELINE    re-solves the full system after every appended row of H.
* EXISTING    maintains the regularized pseudo-inverse B = H^T Q with the
              literal two-term bordered recursion (kept verbatim, redundant
              arithmetic included, so its cost model stays honest).
* ALG1        maintains B with the simplified recursion that reuses the
              row u = h^T B across the step.
* ALG2        maintains Q = (H H^T + k0sq I)^-1 directly; B is never formed.
* ALG3        maintains the factors L (unit upper-triangular) and D with
              L diag(D) L^T = Q, avoiding the drift of updating Q itself.

All rules grow W by a bordered column and agree with BASELINE up to
rounding.  Products along the K (sample) dimension run through the metered
gemm; l- and M-sized bookkeeping is deliberately unmetered so recorded
flops follow the dominant-cost model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
import scipy.linalg

from .errors import (
    DefinitenessLossError,
    DomainError,
    NumericalBreakdownError,
    ShapeError,
)
from .linalg import FlopCounter, gemm, solve_spd

BREAKDOWN_RTOL = 1e-12


class AlgorithmKind(Enum):
    BASELINE = "baseline"
    EXISTING = "existing"
    ALG1 = "alg1"
    ALG2 = "alg2"
    ALG3 = "alg3"


@dataclass(frozen=True)
class SolverState:
    """Immutable snapshot of one solver after l node additions.

    Aux content by kind: EXISTING/ALG1 carry B (K x l); ALG2 carries
    Q (l x l); ALG3 carries L (l x l, unit upper-triangular) and D (l,);
    BASELINE carries nothing beyond H, Y, W.
    """

    kind: AlgorithmKind
    k0sq: float
    H: np.ndarray
    Y: np.ndarray
    W: np.ndarray
    B: np.ndarray | None = None
    Q: np.ndarray | None = None
    L: np.ndarray | None = None
    D: np.ndarray | None = None
    counter: FlopCounter | None = None

    @property
    def l(self) -> int:
        return self.H.shape[0]

    @property
    def sample_count(self) -> int:
        return self.H.shape[1]


def _check_k0sq(k0sq: float) -> float:
    if not (k0sq > 0.0):
        raise DomainError(f"regularization k0sq must be > 0, got {k0sq}")
    return float(k0sq)


def solve_direct(h: np.ndarray, y: np.ndarray, k0sq: float,
                 counter: FlopCounter | None = None) -> np.ndarray:
    """Direct regularized solve W = Y H^T (H H^T + k0sq I)^-1.

    Uses a Cholesky solve, never an explicit inverse; this is the oracle
    every incremental rule is compared against.
    """
    _check_k0sq(k0sq)
    if h.ndim != 2 or y.ndim != 2 or h.shape[1] != y.shape[1]:
        raise ShapeError(f"solve_direct shapes: H {h.shape}, Y {y.shape}")
    r = gemm(h, h.T, counter) + k0sq * np.eye(h.shape[0])
    rhs = gemm(h, y.T, counter)
    return solve_spd(r, rhs).T


def init_solver(kind: AlgorithmKind, h1: np.ndarray, y: np.ndarray, k0sq: float,
                enable_flops: bool = False) -> SolverState:
    """Closed-form l = 1 base case; all kinds agree with solve_direct."""
    k0sq = _check_k0sq(k0sq)
    h1 = np.asarray(h1, dtype=np.float64).reshape(-1)
    if h1.size < 1:
        raise ShapeError("h1 must have at least one entry")
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 2 or y.shape[1] != h1.size:
        raise ShapeError(f"Y must be M x {h1.size}, got {y.shape}")
    r = float(h1 @ h1) + k0sq
    counter = FlopCounter() if enable_flops else None
    state = SolverState(
        kind=kind, k0sq=k0sq, H=h1.reshape(1, -1), Y=y,
        W=(y @ h1 / r).reshape(-1, 1), counter=counter,
    )
    if kind in (AlgorithmKind.EXISTING, AlgorithmKind.ALG1):
        state = replace(state, B=(h1 / r).reshape(-1, 1))
    elif kind is AlgorithmKind.ALG2:
        state = replace(state, Q=np.array([[1.0 / r]]))
    elif kind is AlgorithmKind.ALG3:
        state = replace(state, L=np.array([[1.0]]), D=np.array([1.0 / r]))
    return state


def warm_start(kind: AlgorithmKind, h: np.ndarray, y: np.ndarray, k0sq: float,
               enable_flops: bool = False) -> SolverState:
    """Start from an l0 > 1 node block via one direct factorization.

    Gives every kind a consistent state (W, and B, Q or L/D as needed)
    without replaying l0 incremental steps.
    """
    k0sq = _check_k0sq(k0sq)
    h = np.asarray(h, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if h.ndim != 2 or y.ndim != 2 or h.shape[1] != y.shape[1]:
        raise ShapeError(f"warm_start shapes: H {h.shape}, Y {y.shape}")
    if h.shape[0] == 1:
        return init_solver(kind, h[0], y, k0sq, enable_flops=enable_flops)
    r = h @ h.T + k0sq * np.eye(h.shape[0])
    q = solve_spd(r, np.eye(h.shape[0]))
    q = 0.5 * (q + q.T)
    w = y @ (h.T @ q)
    counter = FlopCounter() if enable_flops else None
    state = SolverState(kind=kind, k0sq=k0sq, H=h, Y=y, W=w, counter=counter)
    if kind in (AlgorithmKind.EXISTING, AlgorithmKind.ALG1):
        state = replace(state, B=h.T @ q)
    elif kind is AlgorithmKind.ALG2:
        state = replace(state, Q=q)
    elif kind is AlgorithmKind.ALG3:
        ld, dd, _ = scipy.linalg.ldl(r, lower=True)
        # R = Ll diag(dl) Ll^T  =>  Q = L diag(D) L^T with L = Ll^-T
        upper = scipy.linalg.solve_triangular(
            ld, np.eye(h.shape[0]), lower=True, unit_diagonal=True
        ).T
        state = replace(state, L=upper, D=1.0 / np.diag(dd))
    return state


def compute_p(state: SolverState, h_bar: np.ndarray) -> np.ndarray:
    """Cross term p = H h_bar shared by every incremental rule (cost 2lK)."""
    h_bar = np.asarray(h_bar, dtype=np.float64).reshape(-1)
    if h_bar.size != state.sample_count:
        raise ShapeError(
            f"h_bar has {h_bar.size} entries, expected K={state.sample_count}"
        )
    return gemm(state.H, h_bar.reshape(-1, 1), state.counter).reshape(-1)


def _schur_denominator(c: float, correction: float, node_index: int) -> float:
    """Validate 1/tau = c - correction; c = h^T h + k0sq is the safe scale."""
    delta = c - correction
    if abs(delta) <= BREAKDOWN_RTOL * c:
        raise NumericalBreakdownError(
            f"Schur denominator {delta:.3e} vanished at node {node_index}"
        )
    if delta <= 0.0:
        raise DefinitenessLossError(
            f"lost positive definiteness at node {node_index} (denominator {delta:.3e})",
            node_index=node_index,
        )
    return delta


def _grown(state: SolverState, h_bar: np.ndarray, w_new: np.ndarray, **aux) -> SolverState:
    return replace(
        state,
        H=np.vstack([state.H, h_bar.reshape(1, -1)]),
        W=w_new,
        **aux,
    )


def add_node_baseline(state: SolverState, h_bar: np.ndarray) -> SolverState:
    h_bar = np.asarray(h_bar, dtype=np.float64).reshape(-1)
    h_new = np.vstack([state.H, h_bar.reshape(1, -1)])
    w = solve_direct(h_new, state.Y, state.k0sq, state.counter)
    return _grown(state, h_bar, w)


def add_node_existing(state: SolverState, h_bar: np.ndarray) -> SolverState:
    """Literal two-term bordered update of the pseudo-inverse B.

    Both terms evaluate their own ((c I - h h^T) B) product and the output
    weights are recomputed in full as Y B, which is exactly the 16lK + 2MlK
    cost this rule is charged in comparisons.
    """
    cnt = state.counter
    h_bar = np.asarray(h_bar, dtype=np.float64).reshape(-1)
    h_col = h_bar.reshape(-1, 1)
    b = state.B
    c = float(h_bar @ h_bar) + state.k0sq

    # first term: ((c I - h h^T) B) (H h) (h^T B) / (c (c - h^T B H h))
    u1 = gemm(h_col.T, b, cnt)                       # 1 x l
    g1 = c * b - gemm(h_col, u1, cnt)                # K x l
    p = gemm(state.H, h_col, cnt)                    # l x 1
    v = gemm(g1, p, cnt)                             # K x 1
    t1 = gemm(v, u1, cnt)                            # K x l
    d = gemm(u1, p, cnt)[0, 0]                       # h^T B H h
    delta = _schur_denominator(c, d, state.l + 1)
    # second term: ((c I - h h^T) B) / c, evaluated afresh as printed
    u2 = gemm(h_col.T, b, cnt)
    g2 = c * b - gemm(h_col, u2, cnt)
    b_tilde = t1 / (c * delta) + g2 / c

    b_bar = (-gemm(b_tilde, p, cnt).reshape(-1) + h_bar) / c
    b_new = np.hstack([b_tilde, b_bar.reshape(-1, 1)])
    w = gemm(state.Y, b_new, cnt)
    return _grown(state, h_bar, w, B=b_new)


def add_node_alg1(state: SolverState, h_bar: np.ndarray) -> SolverState:
    """Simplified B update; the row u = h^T B is computed once and reused."""
    cnt = state.counter
    h_bar = np.asarray(h_bar, dtype=np.float64).reshape(-1)
    h_col = h_bar.reshape(-1, 1)
    b = state.B
    c = float(h_bar @ h_bar) + state.k0sq

    p = gemm(state.H, h_col, cnt)                    # l x 1
    u = gemm(h_col.T, b, cnt).reshape(-1)            # h^T B, reused twice
    delta = _schur_denominator(c, float(u @ p.reshape(-1)), state.l + 1)
    tau = 1.0 / delta
    b_bar = tau * (h_bar - gemm(b, p, cnt).reshape(-1))
    b_tilde = b - np.outer(b_bar, u)
    w_bar = gemm(state.Y, b_bar.reshape(-1, 1), cnt).reshape(-1)
    w_tilde = state.W - np.outer(w_bar, u)
    w = np.hstack([w_tilde, w_bar.reshape(-1, 1)])
    return _grown(state, h_bar, w, B=np.hstack([b_tilde, b_bar.reshape(-1, 1)]))


def _weight_border(state: SolverState, h_bar: np.ndarray, p: np.ndarray,
                   tau: float, t_tilde: np.ndarray) -> np.ndarray:
    """Shared W growth for the Q- and factor-based rules.

    w_bar = tau (Y h - W p); the retained block moves by the rank-one
    correction W + w_bar t_tilde^T, where t_tilde = t / tau.
    """
    cnt = state.counter
    w_bar = tau * (
        gemm(state.Y, h_bar.reshape(-1, 1), cnt).reshape(-1) - state.W @ p
    )
    w_tilde = state.W + np.outer(w_bar, t_tilde)
    return np.hstack([w_tilde, w_bar.reshape(-1, 1)])


def add_node_alg2(state: SolverState, h_bar: np.ndarray) -> SolverState:
    """Bordered update of the inverse Q; the pseudo-inverse is never formed."""
    h_bar = np.asarray(h_bar, dtype=np.float64).reshape(-1)
    c = float(h_bar @ h_bar) + state.k0sq
    p = compute_p(state, h_bar)

    qp = state.Q @ p
    delta = _schur_denominator(c, float(p @ qp), state.l + 1)
    tau = 1.0 / delta
    t = -tau * qp
    q_tilde = state.Q + np.outer(t, t) / tau
    q_new = np.block([[q_tilde, t.reshape(-1, 1)], [t.reshape(1, -1), tau]])

    w = _weight_border(state, h_bar, p, tau, t / tau)
    return _grown(state, h_bar, w, Q=q_new)


def add_node_q_unsimplified(state: SolverState, h_bar: np.ndarray) -> SolverState:
    """Reference Q recursion in its original order and form.

    Q_tilde is corrected first, then t from Q_tilde, then tau with the
    squared denominator.  Retained only to cross-check the simplified rule;
    both must produce identical states up to rounding.
    """
    h_bar = np.asarray(h_bar, dtype=np.float64).reshape(-1)
    c = float(h_bar @ h_bar) + state.k0sq
    p = compute_p(state, h_bar)

    qp = state.Q @ p
    delta = _schur_denominator(c, float(p @ qp), state.l + 1)
    q_tilde = state.Q + np.outer(qp, qp) / delta
    qtp = q_tilde @ p
    t = -qtp / c
    tau = float(p @ qtp) / (c * c) + 1.0 / c
    q_new = np.block([[q_tilde, t.reshape(-1, 1)], [t.reshape(1, -1), tau]])

    w = _weight_border(state, h_bar, p, tau, t / tau)
    return _grown(state, h_bar, w, Q=q_new)


def add_node_alg3(state: SolverState, h_bar: np.ndarray) -> SolverState:
    """Bordered update of the factors L, D with L diag(D) L^T = Q.

    The product L D L^T is never materialized: v = L^T p, then the scaled
    back product gives both the new column and the Schur denominator.
    """
    h_bar = np.asarray(h_bar, dtype=np.float64).reshape(-1)
    c = float(h_bar @ h_bar) + state.k0sq
    p = compute_p(state, h_bar)

    v = state.L.T @ p
    dv = state.D * v
    t_tilde = -(state.L @ dv)
    delta = _schur_denominator(c, float(v @ dv), state.l + 1)
    tau = 1.0 / delta

    l_new = np.zeros((state.l + 1, state.l + 1))
    l_new[: state.l, : state.l] = state.L
    l_new[: state.l, state.l] = t_tilde
    l_new[state.l, state.l] = 1.0
    d_new = np.append(state.D, tau)

    w = _weight_border(state, h_bar, p, tau, t_tilde)
    return _grown(state, h_bar, w, L=l_new, D=d_new)


_ADDERS = {
    AlgorithmKind.BASELINE: add_node_baseline,
    AlgorithmKind.EXISTING: add_node_existing,
    AlgorithmKind.ALG1: add_node_alg1,
    AlgorithmKind.ALG2: add_node_alg2,
    AlgorithmKind.ALG3: add_node_alg3,
}


def add_node(state: SolverState, h_bar: np.ndarray) -> SolverState:
    """Dispatch one node addition to the state's update rule."""
    return _ADDERS[state.kind](state, h_bar)


def current_weights(state: SolverState) -> np.ndarray:
    return state.W


def state_to_json(state: SolverState, include_debug: bool = False) -> str:
    """Snapshot for cross-implementation weight comparison."""
    doc = {
        "kind": state.kind.value,
        "l": state.l,
        "k0sq": state.k0sq,
        "W": {"rows": state.W.shape[0], "cols": state.W.shape[1],
              "data": state.W.reshape(-1).tolist()},
    }
    if include_debug:
        debug = {}
        for name in ("B", "Q", "L"):
            m = getattr(state, name)
            if m is not None:
                debug[name] = {"rows": m.shape[0], "cols": m.shape[1],
                               "data": m.reshape(-1).tolist()}
        if state.D is not None:
            debug["D"] = state.D.tolist()
        doc["debug"] = debug
    return json.dumps(doc)
