"""Dense complex linear algebra on small qutrit Hilbert spaces.

Kets carry an explicit tensor factorization (``dims``). Operators and density
matrices are plain square ``complex128`` numpy arrays. Basis labels map to
flat indices row-major, leftmost factor most significant, so
``|a>|b>|c>`` lives at ``9*a + 3*b + c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ContractViolation, NumericalError, ShapeError

EQ_TOL = 1e-12
HERMITIAN_TOL = 1e-10
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 50
TRACE_TOL = 1e-10


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Ket:
    """Pure state vector over a labeled product of factor spaces."""

    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ShapeError(f"invalid factor dimensions {dims}")
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != math.prod(dims):
            raise ShapeError(f"{amps.size} amplitudes do not match dims {dims}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", _freeze(amps))

    @classmethod
    def basis(cls, labels: Sequence[int], dims: Sequence[int] | None = None) -> Ket:
        """Computational basis ket ``|labels[0]>|labels[1]>...``."""
        dims = tuple(dims) if dims is not None else (3,) * len(labels)
        amps = np.zeros(math.prod(dims), dtype=complex)
        amps[np.ravel_multi_index(tuple(labels), dims)] = 1.0
        return cls(dims, amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = EQ_TOL) -> bool:
        return abs(self.norm - 1.0) <= tol

    def normalized(self) -> Ket:
        n = self.norm
        if n == 0.0:
            raise ZeroDivisionError("cannot normalize the zero vector")
        return Ket(self.dims, self.amplitudes / n)

    def scaled(self, c: complex) -> Ket:
        return Ket(self.dims, self.amplitudes * c)

    def __add__(self, other: Ket) -> Ket:
        _check_same_dims(self, other)
        return Ket(self.dims, self.amplitudes + other.amplitudes)

    def __sub__(self, other: Ket) -> Ket:
        _check_same_dims(self, other)
        return Ket(self.dims, self.amplitudes - other.amplitudes)

    def __repr__(self) -> str:
        return f"Ket(dims={self.dims}, amplitudes={np.array2string(self.amplitudes, precision=4)})"


def _check_same_dims(a: Ket, b: Ket) -> None:
    if a.dims != b.dims:
        raise ShapeError(f"dimension mismatch: {a.dims} vs {b.dims}")


def as_operator(o) -> np.ndarray:
    """Validate and return ``o`` as a square finite complex matrix."""
    m = np.asarray(o, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"operator must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("operator entries must be finite")
    return m


def tensor(a: Ket, b: Ket) -> Ket:
    return Ket(a.dims + b.dims, np.kron(a.amplitudes, b.amplitudes))


def inner(a: Ket, b: Ket) -> complex:
    """Return ``<a|b>`` (conjugate-linear in the first argument)."""
    _check_same_dims(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def apply(o, k: Ket) -> Ket:
    """Matrix-vector product. The result is not renormalized."""
    m = as_operator(o)
    if m.shape[0] != k.dim:
        raise ShapeError(f"operator of side {m.shape[0]} cannot act on dims {k.dims}")
    return Ket(k.dims, m @ k.amplitudes)


def dagger(o) -> np.ndarray:
    return as_operator(o).conj().T


def projector(k: Ket) -> np.ndarray:
    """Density matrix ``|k><k|``."""
    return np.outer(k.amplitudes, k.amplitudes.conj())


def is_hermitian(o, tol: float = HERMITIAN_TOL) -> bool:
    m = as_operator(o)
    return float(np.max(np.abs(m - m.conj().T), initial=0.0)) <= tol


def _check_factor(rho: np.ndarray, index: int, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if rho.shape[0] != math.prod(dims):
        raise ShapeError(f"matrix side {rho.shape[0]} does not match dims {dims}")
    if not 0 <= index < len(dims):
        raise ShapeError(f"factor index {index} out of range for {len(dims)} factors")
    return dims


def partial_trace(rho, keep: int, dims: Sequence[int]) -> np.ndarray:
    """Reduced density matrix on factor ``keep``, tracing out all the others."""
    rho = as_operator(rho)
    dims = _check_factor(rho, keep, dims)
    n = len(dims)
    t = rho.reshape(dims + dims)
    # move kept row/col axes to the front, then trace the remaining pairs
    order = [keep, n + keep] + [i for i in range(n) if i != keep] + [n + i for i in range(n) if i != keep]
    t = t.transpose(order)
    d = dims[keep]
    rest = math.prod(dims) // d
    t = t.reshape(d, d, rest, rest)
    return np.trace(t, axis1=2, axis2=3)


def partial_transpose(rho, party: int, dims: Sequence[int]) -> np.ndarray:
    """Transpose the row/column indices of factor ``party`` only."""
    rho = as_operator(rho)
    dims = _check_factor(rho, party, dims)
    n = len(dims)
    t = rho.reshape(dims + dims)
    axes = list(range(2 * n))
    axes[party], axes[n + party] = axes[n + party], axes[party]
    side = math.prod(dims)
    return t.transpose(axes).reshape(side, side)


def _max_offdiag(a: np.ndarray) -> float:
    off = np.abs(a - np.diag(np.diag(a)))
    return float(off.max(initial=0.0))


def hermitian_eigenvalues(o) -> list[float]:
    """Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.

    Each pivot ``a[p, q] = |a| e^{i theta}`` is first made real by a diagonal
    phase on column ``q`` and then annihilated by a real Givens rotation.
    Returns the eigenvalues in descending order; ties keep diagonal order.

    Raises:
        ContractViolation: input is not Hermitian within 1e-10.
        NumericalError: off-diagonal mass does not fall below the convergence
            threshold within 50 sweeps, or the eigenvalue sum drifts from
            the trace.
    """
    a = as_operator(o).copy()
    if not is_hermitian(a):
        raise ContractViolation("hermitian_eigenvalues requires a Hermitian matrix")
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    trace = float(np.trace(a).real)
    # absolute threshold for O(1) matrices, scaled up for larger norms
    tol = JACOBI_TOL * max(1.0, float(np.linalg.norm(a)))

    for _ in range(JACOBI_MAX_SWEEPS):
        if _max_offdiag(a) <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                cols = a[:, [p, q]] @ g
                a[:, p], a[:, q] = cols[:, 0], cols[:, 1]
                rows = g.conj().T @ a[[p, q], :]
                a[p, :], a[q, :] = rows[0], rows[1]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    else:
        if _max_offdiag(a) > tol:
            raise NumericalError(f"Jacobi failed to converge in {JACOBI_MAX_SWEEPS} sweeps")

    diag = [float(x) for x in np.diag(a).real]
    if abs(math.fsum(diag) - trace) > TRACE_TOL * max(1.0, abs(trace)):
        raise NumericalError("eigenvalue sum deviates from the trace")
    order = sorted(range(n), key=lambda i: -diag[i])
    return [diag[i] for i in order]


def singular_values(o) -> list[float]:
    """Singular values, descending, as square roots of eig(O^dagger O)."""
    m = as_operator(o)
    ev = hermitian_eigenvalues(m.conj().T @ m)
    return [math.sqrt(max(x, 0.0)) for x in ev]
