"""Discrete-time LIF dynamics producing sparse codes.

Each coding neuron integrates a constant excitatory drive (the inner
product of the input with its atom) against leak and lateral inhibition
from currently-firing neurons, then passes its membrane potential
through a soft threshold:

    u <- u + (dt / tau) * (b - u - inhibition(a))
    a <- T_lambda(u)

The update is synchronous (inhibition uses the previous step's
activations), starts from u = 0, and runs a fixed number of steps, so a
run is a pure function of (dictionary, input, config). An optional
infinity-norm stopping rule can cut runs short; it is off by default so
workload accounting sees a fixed step count.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import dictionary as _dict
from .validation import DataError, DivergenceError, as_vector

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LcaConfig:
    """Knobs of the neuron dynamics.

    Defaults follow the reference operating point: threshold 2, leak
    time-constant 100, 100 time steps, unit Euler step.
    """

    threshold_lambda: float = 2.0
    leak_tau: float = 100.0
    steps: int = 100
    step_size: float = 1.0
    backend: str = "auto"          # auto | materialized | matrix_free
    record_trace: bool = False
    early_stop_tol: float | None = None
    gramian_budget_bytes: int = _dict.DEFAULT_GRAMIAN_BUDGET_BYTES

    def __post_init__(self):
        if self.threshold_lambda < 0:
            raise DataError(f"threshold_lambda must be >= 0, got {self.threshold_lambda}")
        if self.leak_tau <= 0:
            raise DataError(f"leak_tau must be > 0, got {self.leak_tau}")
        if self.steps < 1:
            raise DataError(f"steps must be >= 1, got {self.steps}")
        if self.step_size <= 0:
            raise DataError(f"step_size must be > 0, got {self.step_size}")


@dataclass
class LcaState:
    """Membrane potentials and activations after `step` updates."""

    u: np.ndarray
    a: np.ndarray
    step: int = 0


@dataclass
class SparseCode:
    """Final activations of one encode plus per-step firing counts."""

    a: np.ndarray
    fired_per_step: np.ndarray
    b_cache: np.ndarray
    energy_trace: np.ndarray | None = None
    recon_trace: np.ndarray | None = None
    sparsity_trace: np.ndarray | None = None
    steps_run: int = 0

    @property
    def m(self) -> int:
        return self.a.shape[0]

    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self.a))


def soft_threshold(u, lam):
    """Shrinkage nonlinearity: 0 below the threshold, |u| - lam beyond it.

    Works elementwise on arrays. At |u| == lam the output is 0 either
    way, and lam == 0 reduces to the identity.
    """
    if lam < 0:
        raise DataError(f"threshold must be >= 0, got {lam}")
    return np.sign(u) * np.maximum(np.abs(u) - lam, 0.0)


def drive(dictionary, s, counter=None):
    """Excitatory input per neuron: inner product of the input with each atom.

    Computed once per input; it stays constant across time steps.
    """
    s = as_vector(s, dictionary.n, "input")
    if not np.isfinite(s).all():
        raise DataError("input contains non-finite values")
    b = dictionary.atoms.astype(np.float64) @ s.astype(np.float64)
    if counter is not None:
        m, n = dictionary.m, dictionary.n
        counter.record("drive", mul=m * n, add=m * (n - 1))
    return b


def energy(dictionary, s, a, lam):
    """Sparse-coding objective: 0.5 * ||s - recon||^2 + lam * sum(|a|).

    The reconstruction here uses the unit-norm atoms, i.e. the space the
    dynamics operate in.
    """
    s = as_vector(s, dictionary.n, "input").astype(np.float64)
    a = as_vector(a, dictionary.m, "activations").astype(np.float64)
    resid = s - dictionary.atoms.astype(np.float64).T @ a
    return 0.5 * float(resid @ resid) + float(lam) * float(np.abs(a).sum())


def _energy_terms(atoms64, s64, a, lam):
    resid = s64 - atoms64.T @ a
    recon = 0.5 * float(resid @ resid)
    sparsity = float(lam) * float(np.abs(a).sum())
    return recon, sparsity


def step(state, b, operator, cfg, counter=None):
    """Advance the dynamics one synchronous Euler step."""
    inhib = operator.apply(state.a, counter=counter)
    rate = cfg.step_size / cfg.leak_tau
    # overflow becomes inf and is reported as divergence below
    with np.errstate(over="ignore", invalid="ignore"):
        u = state.u + rate * (b - state.u - inhib)
    if counter is not None:
        m = u.shape[0]
        counter.record("leak", mul=m, add=3 * m)
    if not np.isfinite(u).all():
        raise DivergenceError(
            f"non-finite membrane potential at step {state.step + 1}; "
            "reduce step_size or check input scale",
            step=state.step + 1,
        )
    a = soft_threshold(u, cfg.threshold_lambda)
    if counter is not None:
        # one shrink subtraction per firing neuron; comparisons not counted
        counter.record("threshold", add=int(np.count_nonzero(a)))
    return LcaState(u=u, a=a, step=state.step + 1)


def encode(dictionary, s, cfg=None, operator=None, counter=None):
    """Run the dynamics from u = 0 and return the sparse code.

    Deterministic for fixed (dictionary, input, config). Raises
    DivergenceError if the membrane potentials leave the finite range.
    """
    cfg = cfg or LcaConfig()
    if operator is None:
        operator = _dict.resolve_operator(dictionary, cfg.backend, cfg.gramian_budget_bytes)
    else:
        _dict.check_operator(operator, dictionary)
    b = drive(dictionary, s, counter=counter)
    state = LcaState(u=np.zeros(dictionary.m), a=np.zeros(dictionary.m))
    fired = np.zeros(cfg.steps, dtype=np.int64)
    recon_tr = sparsity_tr = energy_tr = None
    atoms64 = s64 = None
    if cfg.record_trace:
        recon_tr = np.zeros(cfg.steps)
        sparsity_tr = np.zeros(cfg.steps)
        atoms64 = dictionary.atoms.astype(np.float64)
        s64 = np.asarray(s, dtype=np.float64)
    steps_run = cfg.steps
    for k in range(cfg.steps):
        prev_u = state.u
        state = step(state, b, operator, cfg, counter=counter)
        fired[k] = np.count_nonzero(state.a)
        if cfg.record_trace:
            recon_tr[k], sparsity_tr[k] = _energy_terms(
                atoms64, s64, state.a, cfg.threshold_lambda
            )
        if cfg.early_stop_tol is not None:
            if np.max(np.abs(state.u - prev_u)) < cfg.early_stop_tol:
                steps_run = k + 1
                fired = fired[:steps_run]
                if cfg.record_trace:
                    recon_tr = recon_tr[:steps_run]
                    sparsity_tr = sparsity_tr[:steps_run]
                break
    if cfg.record_trace:
        energy_tr = recon_tr + sparsity_tr
    return SparseCode(
        a=state.a,
        fired_per_step=fired,
        b_cache=b,
        energy_trace=energy_tr,
        recon_trace=recon_tr,
        sparsity_trace=sparsity_tr,
        steps_run=steps_run,
    )


def encode_batch(dictionary, inputs, cfg=None, operator=None):
    """Encode a batch of inputs with one synchronized run of the dynamics.

    Float32 fast path built on dense/sparse matrix products; per-input
    results match single encodes to float32 accuracy, not bitwise.
    Returns a list of SparseCode.
    """
    cfg = cfg or LcaConfig()
    inputs = np.asarray(inputs, dtype=np.float32)
    if inputs.ndim != 2 or inputs.shape[1] != dictionary.n:
        raise DataError(
            f"batch must have shape (B, {dictionary.n}), got {inputs.shape}"
        )
    if not np.isfinite(inputs).all():
        raise DataError("batch contains non-finite values")
    if operator is None:
        operator = _dict.resolve_operator(dictionary, cfg.backend, cfg.gramian_budget_bytes)
    else:
        _dict.check_operator(operator, dictionary)
    atoms = dictionary.atoms
    bsz = inputs.shape[0]
    b = inputs @ atoms.T                      # (B, M) drives
    u = np.zeros_like(b)
    a = np.zeros_like(b)
    fired = np.zeros((bsz, cfg.steps), dtype=np.int64)
    with np.errstate(over="ignore"):
        rate = np.float32(cfg.step_size / cfg.leak_tau)
    lam = np.float32(cfg.threshold_lambda)
    recon_tr = sparsity_tr = None
    if cfg.record_trace:
        recon_tr = np.zeros((bsz, cfg.steps))
        sparsity_tr = np.zeros((bsz, cfg.steps))
    for k in range(cfg.steps):
        inhib = operator.apply_batch(a)
        with np.errstate(over="ignore", invalid="ignore"):
            u += rate * (b - u - inhib)
        if not np.isfinite(u).all():
            raise DivergenceError(
                f"non-finite membrane potential at step {k + 1}", step=k + 1
            )
        np.sign(u, out=a)
        a *= np.maximum(np.abs(u) - lam, 0.0)
        fired[:, k] = np.count_nonzero(a, axis=1)
        if cfg.record_trace:
            resid = inputs - a @ atoms
            recon_tr[:, k] = 0.5 * np.einsum("ij,ij->i", resid, resid, dtype=np.float64)
            sparsity_tr[:, k] = float(lam) * np.abs(a).sum(axis=1, dtype=np.float64)
    codes = []
    for i in range(bsz):
        codes.append(
            SparseCode(
                a=a[i].copy(),
                fired_per_step=fired[i].copy(),
                b_cache=b[i].copy(),
                energy_trace=None if recon_tr is None else recon_tr[i] + sparsity_tr[i],
                recon_trace=None if recon_tr is None else recon_tr[i].copy(),
                sparsity_trace=None if sparsity_tr is None else sparsity_tr[i].copy(),
                steps_run=cfg.steps,
            )
        )
    return codes


def energy_descent_violations(code, tol=1e-3):
    """Count upward energy jumps after the first firing step.

    Returns (violations, checked_steps). Transient increases beyond
    ``tol`` are logged; callers decide how many are acceptable.
    """
    if code.energy_trace is None:
        raise DataError("code has no energy trace; encode with record_trace=True")
    fired_at = np.flatnonzero(code.fired_per_step)
    if fired_at.size == 0:
        return 0, 0
    start = int(fired_at[0])
    trace = code.energy_trace[start:]
    deltas = np.diff(trace)
    bad = np.flatnonzero(deltas > tol)
    for idx in bad:
        log.warning(
            "energy rose by %.3e at step %d", deltas[idx], start + idx + 1
        )
    return int(bad.size), int(deltas.size)


def write_trace_csv(code, fileobj):
    """Dump a per-step trace: step, fired_count, energy and its two terms."""
    if code.energy_trace is None:
        raise DataError("code has no trace; encode with record_trace=True")
    fileobj.write("step,fired_count,energy,reconstruction_term,sparsity_term\n")
    for k in range(code.steps_run):
        fileobj.write(
            f"{k},{int(code.fired_per_step[k])},{float(code.energy_trace[k])!r},"
            f"{float(code.recon_trace[k])!r},{float(code.sparsity_trace[k])!r}\n"
        )
