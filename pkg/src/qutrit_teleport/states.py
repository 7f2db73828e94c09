"""Named qutrit states and correction operators.

Holds the two shared channels, the nine-element maximally entangled
measurement basis, Bob's conditional (collapsed) states, the correction
operators exactly as printed in the source derivation, and operators
synthesized from first principles. Collapsed states are always computed by
projection; the printed forms exist only as audit targets.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import linalg
from .errors import DegenerateInputError, DomainError, ShapeError, StructureError
from .linalg import Ket

OMEGA = cmath.exp(2j * math.pi / 3)
OMEGA2 = cmath.exp(4j * math.pi / 3)

UNIT_TOL = 1e-9
AUDIT_TOL = 1e-9
MONOMIAL_TOL = 1e-12

PROBE_SET_VERSION = "probes-v1"
PROBE_SEED = 20240917
PROBE_RANDOM_COUNT = 20


class ChannelKind(str, Enum):
    U = "u"
    NU = "nu"

    @property
    def label(self) -> str:
        return "chi^U" if self is ChannelKind.U else "chi^NU"


class Provenance(str, Enum):
    PAPER = "paper-printed"
    SYNTHESIZED = "synthesized"


def _outcome(k: int) -> int:
    if not isinstance(k, (int, np.integer)) or not 0 <= k <= 8:
        raise DomainError(f"outcome index must be an integer in 0..8, got {k!r}")
    return int(k)


def unknown_qutrit(alpha: complex, beta: complex, gamma: complex, *, normalize: bool = False) -> Ket:
    """Single-qutrit state ``alpha|0> + beta|1> + gamma|2>``.

    With ``normalize=False`` the coefficient triple must already have unit
    norm within 1e-9; otherwise any nonzero triple is rescaled.
    """
    amps = np.array([alpha, beta, gamma], dtype=complex)
    norm = float(np.linalg.norm(amps))
    if norm <= 1e-15:
        raise DegenerateInputError("the zero vector is not a quantum state")
    if normalize:
        amps = amps / norm
    elif abs(norm - 1.0) > UNIT_TOL:
        raise DomainError(f"coefficients have norm {norm:.12g}, expected 1")
    return Ket((3,), amps)


def haar_qutrit(rng: np.random.Generator) -> Ket:
    """Rotation-invariant random qutrit from three complex standard normals."""
    z = rng.standard_normal(6)
    amps = z[:3] + 1j * z[3:]
    return Ket((3,), amps / np.linalg.norm(amps))


def channel(kind: ChannelKind) -> Ket:
    kind = ChannelKind(kind)
    amps = np.zeros(9, dtype=complex)
    if kind is ChannelKind.U:
        amps[[0, 4, 8]] = 1.0 / math.sqrt(3.0)
    else:
        amps[[0, 4, 8]] = np.array([-2.0, 1.0, 1.0]) / math.sqrt(6.0)
    return Ket((3, 3), amps)


def leslie_state(k: int) -> Ket:
    """Basis element ``k = 3*s + p``.

    Places ``omega**(p*t) / sqrt(3)`` on ``|t>|t+s mod 3>`` for ``t = 0, 1, 2``.
    """
    s, p = divmod(_outcome(k), 3)
    amps = np.zeros(9, dtype=complex)
    for t in range(3):
        amps[3 * t + (t + s) % 3] = OMEGA ** ((p * t) % 3) / math.sqrt(3.0)
    return Ket((3, 3), amps)


def leslie_matrix() -> np.ndarray:
    """9x9 array whose row ``k`` holds the amplitudes of basis element ``k``."""
    return np.array([leslie_state(k).amplitudes for k in range(9)])


def computational_from_leslie(b: int, c: int) -> list[tuple[int, complex]]:
    """Expand ``|b>|c>`` in the measurement basis (nonzero terms only)."""
    if b not in (0, 1, 2) or c not in (0, 1, 2):
        raise DomainError(f"trit labels must be 0, 1 or 2, got ({b}, {c})")
    target = Ket.basis((b, c))
    terms = []
    for k in range(9):
        coeff = linalg.inner(leslie_state(k), target)
        if abs(coeff) > MONOMIAL_TOL:
            terms.append((k, coeff))
    return terms


_R3 = 1.0 / math.sqrt(3.0)

# |b>|c> -> [(k, coefficient)] exactly as printed in the re-expression table
PRINTED_REEXPRESSION: dict[tuple[int, int], list[tuple[int, complex]]] = {
    (0, 0): [(0, _R3), (1, _R3), (2, _R3)],
    (0, 1): [(3, _R3), (4, _R3), (5, _R3)],
    (0, 2): [(6, _R3), (7, _R3), (8, _R3)],
    (2, 1): [(6, _R3), (7, OMEGA * _R3), (8, OMEGA2 * _R3)],
    (1, 0): [(6, _R3), (7, OMEGA2 * _R3), (8, OMEGA * _R3)],
    (1, 2): [(3, _R3), (4, OMEGA2 * _R3), (5, OMEGA * _R3)],
    (2, 0): [(3, _R3), (4, OMEGA * _R3), (5, OMEGA2 * _R3)],
    (1, 1): [(0, _R3), (1, OMEGA2 * _R3), (2, OMEGA * _R3)],
    (2, 2): [(0, _R3), (1, OMEGA * _R3), (2, OMEGA2 * _R3)],
}


# Printed collapsed states. Row j of each entry is (coefficient, source) with
# source 0/1/2 selecting alpha/beta/gamma: component j = coefficient * phi[source].
PRINTED_STATES: dict[ChannelKind, list[list[tuple[complex, int]]]] = {
    ChannelKind.U: [
        [(1, 0), (1, 1), (1, 2)],
        [(1, 0), (OMEGA2, 1), (OMEGA, 2)],
        [(1, 0), (OMEGA, 1), (OMEGA2, 2)],
        [(1, 2), (1, 0), (1, 1)],
        [(OMEGA, 2), (1, 0), (OMEGA2, 1)],
        [(OMEGA2, 2), (1, 0), (OMEGA, 1)],
        [(1, 1), (1, 2), (1, 0)],
        [(OMEGA2, 1), (OMEGA, 2), (1, 0)],
        [(OMEGA, 1), (OMEGA2, 2), (1, 0)],
    ],
    ChannelKind.NU: [
        [(-2, 0), (1, 1), (1, 2)],
        [(-2, 0), (OMEGA2, 1), (OMEGA, 2)],
        [(-2, 0), (OMEGA, 1), (OMEGA2, 2)],
        [(2, 2), (1, 0), (1, 1)],
        [(-2 * OMEGA, 2), (1, 0), (OMEGA2 / 2, 1)],
        [(-2 * OMEGA2, 2), (1, 0), (OMEGA, 1)],
        [(-2, 1), (1, 2), (1, 0)],
        [(-2 * OMEGA2, 1), (OMEGA, 2), (1, 0)],
        [(-2 * OMEGA, 1), (OMEGA2, 2), (1, 0)],
    ],
}

# Printed correction operators as (row, col, value) triples: value * |row><col|.
PRINTED_OPERATORS: dict[ChannelKind, list[list[tuple[int, int, complex]]]] = {
    ChannelKind.U: [
        [(0, 0, 1), (1, 1, 1), (2, 2, 1)],
        [(0, 0, 1), (1, 1, OMEGA), (2, 2, OMEGA2)],
        [(0, 0, 1), (1, 1, OMEGA2), (2, 2, OMEGA)],
        [(0, 1, 1), (1, 2, 1), (2, 0, 1)],
        [(0, 1, 1), (1, 2, OMEGA), (2, 0, OMEGA2)],
        [(0, 1, 1), (1, 2, OMEGA2), (2, 0, OMEGA)],
        [(0, 2, 1), (1, 0, 1), (2, 1, 1)],
        [(0, 2, 1), (1, 0, OMEGA), (2, 1, OMEGA2)],
        [(0, 2, 1), (1, 0, OMEGA2), (2, 1, OMEGA)],
    ],
    ChannelKind.NU: [
        [(0, 0, -0.5), (1, 1, 1), (2, 2, 1)],
        [(0, 0, -1), (1, 1, 2 * OMEGA2), (2, 2, OMEGA)],
        [(0, 0, 0.5), (1, 1, OMEGA), (2, 2, OMEGA2)],
        [(0, 1, 1), (1, 2, 1), (2, 0, -0.5)],
        [(0, 1, 2), (1, 2, 2 * OMEGA2), (2, 0, -OMEGA)],
        [(0, 1, 1), (1, 2, OMEGA), (2, 0, -0.5 * OMEGA2)],
        [(0, 2, 1), (1, 0, -0.5), (2, 1, 1)],
        [(0, 2, 2), (1, 0, -OMEGA2), (2, 1, 2 * OMEGA2)],
        [(0, 2, 1), (1, 0, -0.5 * OMEGA), (2, 1, OMEGA2)],
    ],
}


def collapsed_state(kind: ChannelKind, k: int, phi: Ket) -> Ket:
    """Raw projection ``(<Psi^k| (x) I)(phi (x) chi)`` onto Bob's qutrit.

    The result keeps the physical amplitude, so its squared norm is the
    probability of outcome ``k``.
    """
    if phi.dims != (3,):
        raise ShapeError(f"expected a single qutrit, got dims {phi.dims}")
    xi = linalg.tensor(phi, channel(kind))
    amps = leslie_state(k).amplitudes.conj() @ xi.amplitudes.reshape(9, 3)
    return Ket((3,), amps)


def branch_transfer(kind: ChannelKind, k: int) -> np.ndarray:
    """Matrix ``T`` with ``collapsed_state(kind, k, phi) = T @ phi``."""
    cols = [collapsed_state(kind, k, Ket.basis((i,))).amplitudes for i in range(3)]
    return np.array(cols).T


def branch_prefactor(kind: ChannelKind) -> float:
    """Global factor separating raw projections from the printed-style states.

    Derived from the projection: the smallest nonzero coefficient modulus
    of outcome 0, i.e. the factor that leaves unit coefficients behind.
    """
    t = np.abs(branch_transfer(kind, 0))
    return float(t[t > MONOMIAL_TOL].min())


def rescaled_collapsed_state(kind: ChannelKind, k: int, phi: Ket) -> Ket:
    """Raw projection divided by :func:`branch_prefactor` (printed convention)."""
    return collapsed_state(kind, k, phi).scaled(1.0 / branch_prefactor(kind))


def printed_transfer(kind: ChannelKind, k: int) -> np.ndarray:
    m = np.zeros((3, 3), dtype=complex)
    for row, (coeff, src) in enumerate(PRINTED_STATES[ChannelKind(kind)][_outcome(k)]):
        m[row, src] = coeff
    return m


def printed_collapsed_state(kind: ChannelKind, k: int, phi: Ket) -> Ket:
    """Collapsed state exactly as printed (no prefactor)."""
    return Ket((3,), printed_transfer(kind, k) @ phi.amplitudes)


def is_monomial(m: np.ndarray, tol: float = MONOMIAL_TOL) -> bool:
    nz = np.abs(m) > tol
    return bool(np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1))


@dataclass(frozen=True, eq=False)
class CorrectionOperator:
    kind: ChannelKind
    outcome: int
    op: np.ndarray
    provenance: Provenance

    def __post_init__(self):
        op = linalg.as_operator(self.op)
        if op.shape != (3, 3):
            raise ShapeError("correction operators act on a single qutrit")
        if not is_monomial(op):
            raise StructureError("correction operator must have one nonzero per row and column")
        op = op.copy()
        op.setflags(write=False)
        object.__setattr__(self, "op", op)

    @property
    def is_unitary(self) -> bool:
        return bool(np.allclose(self.op.conj().T @ self.op, np.eye(3), atol=linalg.EQ_TOL))


def paper_correction(kind: ChannelKind, k: int) -> CorrectionOperator:
    kind = ChannelKind(kind)
    k = _outcome(k)
    m = np.zeros((3, 3), dtype=complex)
    for row, col, value in PRINTED_OPERATORS[kind][k]:
        m[row, col] = value
    return CorrectionOperator(kind, k, m, Provenance.PAPER)


def synthesize_correction(kind: ChannelKind, k: int) -> CorrectionOperator:
    """Invert the branch's monomial structure and rescale to unit norm.

    If the raw projection reads ``sum_j d_j * phi[sigma(j)] |j>``, the
    operator is ``sum_j (1/d_j) |sigma(j)><j|`` divided by its largest
    singular value, so it retrieves a positive multiple of ``phi`` and is
    a valid Kraus operator.
    """
    kind = ChannelKind(kind)
    k = _outcome(k)
    t = branch_transfer(kind, k)
    if not is_monomial(t):
        raise StructureError(f"branch {k} of {kind.label} is not a phase-scaled permutation")
    op = np.zeros((3, 3), dtype=complex)
    for j in range(3):
        src = int(np.argmax(np.abs(t[j])))
        op[src, j] = 1.0 / t[j, src]
    op /= linalg.singular_values(op)[0]
    return CorrectionOperator(kind, k, op, Provenance.SYNTHESIZED)


def correction(kind: ChannelKind, k: int, provenance: Provenance) -> CorrectionOperator:
    if Provenance(provenance) is Provenance.PAPER:
        return paper_correction(kind, k)
    return synthesize_correction(kind, k)


def probe_states() -> list[Ket]:
    """Deterministic audit probes: basis states, uniform state, seeded Haar states."""
    probes = [Ket.basis((i,)) for i in range(3)]
    probes.append(unknown_qutrit(_R3, _R3, _R3))
    rng = np.random.Generator(np.random.Philox(key=PROBE_SEED))
    probes.extend(haar_qutrit(rng) for _ in range(PROBE_RANDOM_COUNT))
    return probes


@dataclass(frozen=True)
class AuditEntry:
    """Outcome of testing one correction operator against one branch state.

    ``residual`` is the worst ``||O s - phi||`` over the probe set;
    ``proportional_residual`` the worst ``min_c ||O s - c phi||``;
    ``coefficient`` the best-fit ``c`` on the first probe and
    ``coefficient_spread`` the largest deviation of any probe's ``c`` from it.
    """

    outcome: int
    provenance: str
    target: str
    holds_exactly: bool
    holds_proportionally: bool
    residual: float
    proportional_residual: float
    coefficient: complex
    coefficient_spread: float


AUDIT_TARGETS = ("projected", "printed")


def audit_entry(op: CorrectionOperator, target: str = "projected", probes: list[Ket] | None = None) -> AuditEntry:
    """Check whether ``op`` maps the branch state back onto ``phi``.

    ``target="projected"`` uses the rescaled projection; ``"printed"`` uses
    the collapsed state as printed.
    """
    if target not in AUDIT_TARGETS:
        raise DomainError(f"unknown audit target {target!r}")
    probes = probe_states() if probes is None else probes
    residual = prop_residual = spread = 0.0
    c0 = None
    for phi in probes:
        if target == "projected":
            s = rescaled_collapsed_state(op.kind, op.outcome, phi)
        else:
            s = printed_collapsed_state(op.kind, op.outcome, phi)
        out = op.op @ s.amplitudes
        residual = max(residual, float(np.linalg.norm(out - phi.amplitudes)))
        c = complex(np.vdot(phi.amplitudes, out))
        prop_residual = max(prop_residual, float(np.linalg.norm(out - c * phi.amplitudes)))
        if c0 is None:
            c0 = c
        spread = max(spread, abs(c - c0))
    holds_exactly = residual <= AUDIT_TOL
    holds_prop = prop_residual <= AUDIT_TOL and spread <= AUDIT_TOL and abs(c0) > AUDIT_TOL
    return AuditEntry(
        outcome=op.outcome,
        provenance=op.provenance.value,
        target=target,
        holds_exactly=holds_exactly,
        holds_proportionally=holds_prop or holds_exactly,
        residual=residual,
        proportional_residual=prop_residual,
        coefficient=c0,
        coefficient_spread=spread,
    )


def audit_retrievals(
    kind: ChannelKind,
    provenance: Provenance = Provenance.PAPER,
    target: str = "projected",
) -> list[AuditEntry]:
    probes = probe_states()
    return [audit_entry(correction(kind, k, provenance), target, probes) for k in range(9)]


def align_global_phase(a: np.ndarray, b: np.ndarray) -> float:
    """Max entrywise ``|a - e^{i t} b|`` after choosing the best phase ``t``."""
    overlap = np.vdot(b.ravel(), a.ravel())
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(a - phase * b)))
