"""Teleportation pipeline: club, measure, communicate, correct.

Three correction modes are offered:

* ``unitary-paper``: Bob applies the printed unitary for the announced
  outcome (only meaningful for the U channel).
* ``synthesized-rescale``: Bob applies the synthesized correction and
  renormalizes the result.
* ``kraus-probabilistic``: the synthesized correction ``K`` is one branch of
  the two-outcome measurement ``{K, sqrt(I - K^dagger K)}``; the failure
  branch output is kept and flagged.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from . import linalg
from .errors import ConfigurationError, DomainError, ShapeError
from .linalg import Ket
from .rng import check_seed, trial_generator
from .states import (
    ChannelKind,
    channel,
    haar_qutrit,
    leslie_matrix,
    paper_correction,
    synthesize_correction,
)

KRAUS_TOL = 1e-10


class CorrectionMode(str, Enum):
    UNITARY_PAPER = "unitary-paper"
    SYNTHESIZED_RESCALE = "synthesized-rescale"
    KRAUS_PROBABILISTIC = "kraus-probabilistic"


def check_mode(kind: ChannelKind, mode: CorrectionMode) -> tuple[ChannelKind, CorrectionMode]:
    kind, mode = ChannelKind(kind), CorrectionMode(mode)
    if mode is CorrectionMode.UNITARY_PAPER and kind is not ChannelKind.U:
        raise ConfigurationError("unitary-paper correction is only defined for the U channel")
    return kind, mode


def club(phi: Ket, kind: ChannelKind) -> Ket:
    """Joint A,B,C state ``phi (x) chi``."""
    if phi.dims != (3,):
        raise ShapeError(f"expected a single qutrit, got dims {phi.dims}")
    return linalg.tensor(phi, channel(kind))


def branch_projections(phi: Ket, kind: ChannelKind) -> np.ndarray:
    """Row ``k``: Bob's unnormalized state after outcome ``k`` (shape 9x3)."""
    xi = club(phi, kind)
    return _leslie_conj() @ xi.amplitudes.reshape(9, 3)


@lru_cache(maxsize=None)
def _leslie_conj() -> np.ndarray:
    m = leslie_matrix().conj()
    m.setflags(write=False)
    return m


def outcome_distribution(phi: Ket, kind: ChannelKind) -> np.ndarray:
    """Born probabilities ``p_k = ||(<Psi^k| (x) I)|xi>||^2``."""
    proj = branch_projections(phi, kind)
    return np.einsum("kj,kj->k", proj.conj(), proj).real


@lru_cache(maxsize=None)
def correction_stack(kind: ChannelKind, mode: CorrectionMode) -> np.ndarray:
    """The nine 3x3 corrections used by ``mode`` (shape 9x3x3)."""
    kind, mode = check_mode(kind, mode)
    if mode is CorrectionMode.UNITARY_PAPER:
        ops = [paper_correction(kind, k).op for k in range(9)]
    else:
        ops = [synthesize_correction(kind, k).op for k in range(9)]
    stack = np.array(ops)
    stack.setflags(write=False)
    return stack


def kraus_complement(k_op: np.ndarray) -> np.ndarray:
    """``sqrt(I - K^dagger K)`` for a monomial ``K`` with ``sigma_max <= 1``.

    For monomial ``K`` the product ``K^dagger K`` is diagonal, so the square
    root is taken entrywise.
    """
    gram = k_op.conj().T @ k_op
    off = gram - np.diag(np.diag(gram))
    if np.max(np.abs(off)) > KRAUS_TOL:
        raise ShapeError("kraus_complement expects a monomial operator")
    d = 1.0 - np.diag(gram).real
    if d.min() < -KRAUS_TOL:
        raise DomainError("operator has singular value above 1; not a Kraus operator")
    return np.diag(np.sqrt(np.clip(d, 0.0, None))).astype(complex)


@lru_cache(maxsize=None)
def complement_stack(kind: ChannelKind) -> np.ndarray:
    stack = np.array([kraus_complement(k_op) for k_op in correction_stack(kind, CorrectionMode.KRAUS_PROBABILISTIC)])
    stack.setflags(write=False)
    return stack


def _normalize_rows(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(m, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    return m / safe[:, None], norms


@dataclass(frozen=True, eq=False)
class BranchTable:
    """Everything a trial needs once ``phi``, channel and mode are fixed."""

    phi: np.ndarray
    probabilities: np.ndarray
    cdf: np.ndarray
    collapsed: np.ndarray  # normalized, 9x3
    success_output: np.ndarray  # normalized corrected state, 9x3
    success_probability: np.ndarray  # 1 outside kraus mode
    success_fidelity: np.ndarray
    failure_output: np.ndarray
    failure_fidelity: np.ndarray


def _fidelities(phi: np.ndarray, outputs: np.ndarray) -> np.ndarray:
    return np.abs(outputs @ phi.conj()) ** 2


def branch_table(phi: Ket, kind: ChannelKind, mode: CorrectionMode) -> BranchTable:
    kind, mode = check_mode(kind, mode)
    proj = branch_projections(phi, kind)
    collapsed, norms = _normalize_rows(proj)
    probs = norms**2
    corrected = np.einsum("kij,kj->ki", correction_stack(kind, mode), collapsed)
    success_out, success_norm = _normalize_rows(corrected)
    if mode is CorrectionMode.KRAUS_PROBABILISTIC:
        p_success = success_norm**2
        failure = np.einsum("kij,kj->ki", complement_stack(kind), collapsed)
        failure_out, _ = _normalize_rows(failure)
    else:
        p_success = np.ones(9)
        failure_out = np.zeros((9, 3), dtype=complex)
    amps = phi.amplitudes
    return BranchTable(
        phi=amps,
        probabilities=probs,
        cdf=np.cumsum(probs),
        collapsed=collapsed,
        success_output=success_out,
        success_probability=p_success,
        success_fidelity=_fidelities(amps, success_out),
        failure_output=failure_out,
        failure_fidelity=_fidelities(amps, failure_out),
    )


def sample_outcome(cdf: np.ndarray, probabilities: np.ndarray, u: float) -> int:
    """Inverse-CDF draw; never returns a zero-probability outcome."""
    # first k with cdf[k] > u; such a step always has p_k > 0
    k = int(np.searchsorted(cdf, u, side="right"))
    if k >= len(cdf):
        # u beyond a total that rounded below 1
        k = int(np.flatnonzero(probabilities > 0)[-1])
    return k


@dataclass(frozen=True, eq=False)
class TrialRecord:
    trial_index: int
    outcome_k: int
    born_probability: float
    corrected: bool
    bob_output: Ket
    fidelity: float
    success_probability: float = 1.0


def _sample(table: BranchTable, rng: np.random.Generator, kraus: bool) -> tuple[int, bool]:
    k = sample_outcome(table.cdf, table.probabilities, rng.random())
    ok = True
    if kraus:
        ok = bool(rng.random() < table.success_probability[k])
    return k, ok


def _trial_from_table(table: BranchTable, rng: np.random.Generator, trial_index: int, kraus: bool) -> TrialRecord:
    k, ok = _sample(table, rng, kraus)
    if ok:
        out, fid = table.success_output[k], table.success_fidelity[k]
    else:
        out, fid = table.failure_output[k], table.failure_fidelity[k]
    return TrialRecord(
        trial_index=trial_index,
        outcome_k=k,
        born_probability=float(table.probabilities[k]),
        corrected=ok,
        bob_output=Ket((3,), out),
        fidelity=float(fid),
        success_probability=float(table.success_probability[k]),
    )


def run_trial(
    phi: Ket,
    kind: ChannelKind,
    mode: CorrectionMode,
    rng: np.random.Generator,
    trial_index: int = 0,
) -> TrialRecord:
    """One full teleportation: sample Alice's outcome, then correct at Bob."""
    kind, mode = check_mode(kind, mode)
    table = branch_table(phi, kind, mode)
    return _trial_from_table(table, rng, trial_index, mode is CorrectionMode.KRAUS_PROBABILISTIC)


def forced_trial(phi: Ket, kind: ChannelKind, mode: CorrectionMode, k: int) -> tuple[Ket, float]:
    """Corrected output and fidelity for outcome ``k`` on the success branch."""
    table = branch_table(phi, kind, mode)
    return Ket((3,), table.success_output[k]), float(table.success_fidelity[k])


HAAR = "haar"


@dataclass(frozen=True)
class RunReport:
    channel: str
    mode: str
    trials: int
    seed: int
    state: object  # list of [re, im] pairs, or "haar"
    frequencies: tuple[float, ...]
    closed_form: tuple[float, ...] | None
    mean_fidelity: float
    post_selected_fidelity: float | None
    success_rate: float
    closed_form_success_rate: float | None


def _run_chunk(kind, mode, seed, start, stop, fixed_table):
    kraus = mode is CorrectionMode.KRAUS_PROBABILISTIC
    n = stop - start
    outcomes = np.empty(n, dtype=np.int64)
    fidelity = np.empty(n)
    success = np.empty(n, dtype=bool)
    for i, t in enumerate(range(start, stop)):
        rng = trial_generator(seed, t)
        if fixed_table is None:
            table = branch_table(haar_qutrit(rng), kind, mode)
        else:
            table = fixed_table
        k, ok = _sample(table, rng, kraus)
        outcomes[i] = k
        fidelity[i] = table.success_fidelity[k] if ok else table.failure_fidelity[k]
        success[i] = ok
    return start, outcomes, fidelity, success


def run_monte_carlo(
    phi_spec: Ket | str,
    kind: ChannelKind,
    mode: CorrectionMode,
    n_trials: int,
    master_seed: int = 0,
    workers: int = 1,
) -> RunReport:
    """Run ``n_trials`` independent teleportations and aggregate them.

    ``phi_spec`` is either a fixed qutrit or ``"haar"`` for a fresh random
    state per trial. Trial ``t`` draws all of its randomness from
    ``trial_generator(master_seed, t)``, so the report does not depend on
    ``workers``.
    """
    kind, mode = check_mode(kind, mode)
    if int(n_trials) < 1:
        raise DomainError("n_trials must be at least 1")
    n_trials = int(n_trials)
    seed = check_seed(master_seed)
    kraus = mode is CorrectionMode.KRAUS_PROBABILISTIC

    fixed = not (isinstance(phi_spec, str) and phi_spec == HAAR)
    if fixed and not isinstance(phi_spec, Ket):
        raise DomainError(f"phi_spec must be a Ket or {HAAR!r}")
    table = branch_table(phi_spec, kind, mode) if fixed else None

    outcomes = np.empty(n_trials, dtype=np.int64)
    fidelity = np.empty(n_trials)
    success = np.empty(n_trials, dtype=bool)
    workers = max(1, min(int(workers), n_trials))
    bounds = np.linspace(0, n_trials, workers + 1).astype(int)
    chunks = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    if workers == 1:
        results = [_run_chunk(kind, mode, seed, a, b, table) for a, b in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_chunk, kind, mode, seed, a, b, table) for a, b in chunks]
            results = [f.result() for f in futures]
    for start, o, f, s in results:
        outcomes[start : start + len(o)] = o
        fidelity[start : start + len(f)] = f
        success[start : start + len(s)] = s

    freqs = np.bincount(outcomes, minlength=9) / n_trials
    n_success = int(success.sum())
    post_selected = None
    if kraus and n_success:
        post_selected = math.fsum(fidelity[success]) / n_success
    closed = closed_success = None
    if fixed:
        closed = tuple(float(p) for p in table.probabilities)
        if kraus:
            closed_success = math.fsum(table.probabilities * table.success_probability)
    return RunReport(
        channel=kind.value,
        mode=mode.value,
        trials=n_trials,
        seed=seed,
        state=[[float(z.real), float(z.imag)] for z in phi_spec.amplitudes] if fixed else HAAR,
        frequencies=tuple(float(x) for x in freqs),
        closed_form=closed,
        mean_fidelity=math.fsum(fidelity) / n_trials,
        post_selected_fidelity=post_selected,
        success_rate=n_success / n_trials,
        closed_form_success_rate=closed_success,
    )
