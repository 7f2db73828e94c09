"""Independent reference computations used only by the tests.

Nothing here imports the code under test's numerical routines: eigenvalues
come from Householder tridiagonalization plus Sturm-sequence bisection on
the characteristic polynomial, and projections are summed term by term
from a hand-transcribed basis table.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

W = cmath.exp(2j * math.pi / 3)
W2 = cmath.exp(4j * math.pi / 3)

# measurement basis transcribed term by term: k -> [(b, c, phase)]
LESLIE_TERMS = {
    0: [(0, 0, 1), (1, 1, 1), (2, 2, 1)],
    1: [(0, 0, 1), (1, 1, W), (2, 2, W2)],
    2: [(0, 0, 1), (1, 1, W2), (2, 2, W)],
    3: [(0, 1, 1), (1, 2, 1), (2, 0, 1)],
    4: [(0, 1, 1), (1, 2, W), (2, 0, W2)],
    5: [(0, 1, 1), (1, 2, W2), (2, 0, W)],
    6: [(0, 2, 1), (1, 0, 1), (2, 1, 1)],
    7: [(0, 2, 1), (1, 0, W), (2, 1, W2)],
    8: [(0, 2, 1), (1, 0, W2), (2, 1, W)],
}

CHANNEL_DIAG = {
    "u": [1 / math.sqrt(3)] * 3,
    "nu": [-2 / math.sqrt(6), 1 / math.sqrt(6), 1 / math.sqrt(6)],
}


def leslie_vector(k: int) -> list[complex]:
    v = [0j] * 9
    for b, c, ph in LESLIE_TERMS[k]:
        v[3 * b + c] = ph / math.sqrt(3)
    return v


def brute_projection(phi, kind: str, k: int) -> list[complex]:
    """``sum_{a,b,c} conj(Psi^k[a,b]) * phi[a] * chi[b,c] |c>`` by explicit loops."""
    chi = CHANNEL_DIAG[kind]
    out = [0j] * 3
    for a, b, ph in LESLIE_TERMS[k]:
        for c in range(3):
            chi_bc = chi[b] if b == c else 0.0
            out[c] += (ph / math.sqrt(3)).conjugate() * complex(phi[a]) * chi_bc
    return out


def brute_probabilities(phi, kind: str) -> list[float]:
    return [sum(abs(z) ** 2 for z in brute_projection(phi, kind, k)) for k in range(9)]


def _householder_tridiagonal(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reduce a Hermitian matrix to real tridiagonal form (diag, |offdiag|)."""
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1 :, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if abs(x[0]) > 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        p = np.eye(n, dtype=complex)
        p[k + 1 :, k + 1 :] -= 2.0 * np.outer(v, v.conj())
        a = p @ a @ p.conj().T
    diag = a.diagonal().real.copy()
    off = np.abs(np.diagonal(a, offset=1))
    return diag, off


def _sturm_count(diag, off, x: float) -> int:
    """Number of eigenvalues strictly below ``x`` (sign changes of the
    leading-minor sequence of ``det(T - x I)``, LDL^T form)."""
    count = 0
    q = diag[0] - x
    if q < 0:
        count += 1
    for i in range(1, len(diag)):
        if q == 0.0:
            q = 1e-300
        q = diag[i] - x - off[i - 1] ** 2 / q
        if q < 0:
            count += 1
    return count


def sturm_eigenvalues(h: np.ndarray, tol: float = 1e-13) -> list[float]:
    """Eigenvalues, descending, by bisection on Sturm counts."""
    diag, off = _householder_tridiagonal(h)
    n = len(diag)
    padded = np.concatenate([[0.0], off, [0.0]])
    radius = max(abs(diag[i]) + padded[i] + padded[i + 1] for i in range(n))
    lo0, hi0 = -radius - 1.0, radius + 1.0
    out = []
    for j in range(n):
        lo, hi = lo0, hi0
        while hi - lo > tol * max(1.0, abs(lo), abs(hi)):
            mid = 0.5 * (lo + hi)
            if _sturm_count(diag, off, mid) > j:
                hi = mid
            else:
                lo = mid
        out.append(0.5 * (lo + hi))
    return sorted(out, reverse=True)


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (x + x.conj().T) / 2


def random_qutrit_amps(rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    return z / np.linalg.norm(z)
