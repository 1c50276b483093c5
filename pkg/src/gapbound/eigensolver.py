"""Dense Hermitian eigensolver with certified residuals.

The decomposition pipeline is the classical one for dense Hermitian
matrices:

1. unitary Householder reduction to tridiagonal form,
2. a diagonal phase rotation that makes the subdiagonal real and
   nonnegative (so the tridiagonal matrix is real symmetric),
3. implicit-shift QL/QR iteration on the real symmetric tridiagonal
   matrix for the full spectral decomposition (LAPACK ``stev``),
4. back-transformation of the two lowest eigenvectors.

Steps 1, 2 and 4 are implemented here; step 3 is delegated to LAPACK
through :func:`scipy.linalg.eigh_tridiagonal`.  Every accepted result is
certified a posteriori: the 2-norm residuals ``|H v - E v|`` of both
returned eigenpairs must not exceed ``tol * max(1, spectral_scale(H))``.

Degenerate ground states are refused rather than resolved arbitrarily:
when the gap falls below ``degeneracy_tol * spectral_scale(H)`` the
solver raises :class:`DegenerateGroundState`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DegenerateGroundState, GapboundError, NonHermitianError, ValidationError

DEFAULT_RESIDUAL_TOL = 1e-10
DEFAULT_DEGENERACY_TOL = 1e-8


class HermitianMatrix:
    """Dense Hermitian matrix, validated and stored read-only.

    Accepts any square array equal to its conjugate transpose within
    ``tol * max(1, max |entry|)`` entrywise; the stored array is the
    exact Hermitian part, so downstream code may rely on ``H == H.conj().T``
    holding exactly.
    """

    __slots__ = ("array",)

    def __init__(self, array, tol: float = 1e-12):
        a = np.asarray(array)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValidationError(f"expected a square matrix, got shape {a.shape}")
        a = a.astype(np.complex128, copy=True)
        if a.size:
            if not np.all(np.isfinite(a.view(np.float64))):
                raise ValidationError("matrix contains non-finite entries")
            scale = max(1.0, float(np.max(np.abs(a))))
            dev = float(np.max(np.abs(a - a.conj().T)))
            if dev > tol * scale:
                raise NonHermitianError(
                    f"matrix deviates from Hermiticity by {dev:.3e} "
                    f"(tolerance {tol * scale:.3e})"
                )
        a = 0.5 * (a + a.conj().T)
        a.flags.writeable = False
        object.__setattr__(self, "array", a)

    def __setattr__(self, name, value):
        raise AttributeError("HermitianMatrix is immutable")

    @property
    def n(self) -> int:
        return self.array.shape[0]

    def __repr__(self):
        return f"HermitianMatrix(n={self.n})"


def spectral_scale(h) -> float:
    """Maximum row 1-norm of the matrix (its infinity norm).

    Used as the natural magnitude for residual and degeneracy tolerances.
    """
    a = h.array if isinstance(h, HermitianMatrix) else np.asarray(h)
    if a.size == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(a), axis=1)))


@dataclass(frozen=True)
class TridiagonalForm:
    """Result of the unitary reduction ``Q^dag H Q = T``.

    ``diag`` and ``sub`` hold the real symmetric tridiagonal matrix T
    (``sub`` is nonnegative); ``reflectors`` stores the Householder
    vector of step k in column k below the diagonal, and ``phases`` the
    diagonal phase rotation applied last.
    """

    diag: np.ndarray
    sub: np.ndarray
    reflectors: np.ndarray
    phases: np.ndarray

    def apply_q(self, z: np.ndarray) -> np.ndarray:
        """Compute Q @ z, mapping tridiagonal eigenvectors back to H's basis."""
        n = self.diag.shape[0]
        y = np.asarray(z, dtype=np.complex128)
        squeeze = y.ndim == 1
        if squeeze:
            y = y[:, None]
        if y.shape[0] != n:
            raise ValidationError(f"expected leading dimension {n}, got {y.shape[0]}")
        y = self.phases[:, None] * y
        for k in range(n - 3, -1, -1):
            v = self.reflectors[k + 1 :, k]
            if v.any():
                y[k + 1 :, :] -= 2.0 * np.outer(v, v.conj() @ y[k + 1 :, :])
        return y[:, 0] if squeeze else y

    def q_matrix(self) -> np.ndarray:
        """Materialize the full unitary Q (mainly for testing)."""
        return self.apply_q(np.eye(self.diag.shape[0], dtype=np.complex128))


def tridiagonalize(h) -> TridiagonalForm:
    """Householder reduction of a Hermitian matrix to real tridiagonal form.

    Each step reflects one column onto the subdiagonal; a final diagonal
    phase rotation turns the (generally complex) subdiagonal into real
    nonnegative entries.  Input that is already tridiagonal skips the
    reflection stage entirely.
    """
    hm = h if isinstance(h, HermitianMatrix) else HermitianMatrix(h)
    a = hm.array.copy()
    a.flags.writeable = True
    n = a.shape[0]
    reflectors = np.zeros((n, n), dtype=np.complex128)

    for k in range(n - 2):
        x = a[k + 1 :, k]
        if not x[1:].any():
            continue
        xnorm = float(np.linalg.norm(x))
        alpha = x[0]
        phase = alpha / abs(alpha) if alpha != 0 else 1.0
        beta = -phase * xnorm
        v = x.copy()
        v[0] -= beta
        v /= np.linalg.norm(v)
        blk = a[k + 1 :, k + 1 :]
        u = blk @ v
        w = u - (v.conj() @ u) * v
        blk -= 2.0 * np.outer(v, w.conj()) + 2.0 * np.outer(w, v.conj())
        a[k + 1, k] = beta
        a[k + 2 :, k] = 0.0
        reflectors[k + 1 :, k] = v

    diag = np.ascontiguousarray(a.diagonal().real)
    subc = np.array([a[j + 1, j] for j in range(n - 1)], dtype=np.complex128)
    phases = np.ones(n, dtype=np.complex128)
    for j in range(n - 1):
        m = abs(subc[j])
        phases[j + 1] = phases[j] * (subc[j] / m) if m > 0 else phases[j]
    sub = np.abs(subc)
    for arr in (diag, sub, reflectors, phases):
        arr.flags.writeable = False
    return TridiagonalForm(diag=diag, sub=sub, reflectors=reflectors, phases=phases)


def _fix_phase(psi: np.ndarray) -> np.ndarray:
    # reproducible global phase: largest-magnitude coefficient real positive
    idx = int(np.argmax(np.abs(psi)))
    c = psi[idx]
    if abs(c) > 0:
        psi = psi * (c.conjugate() / abs(c))
    return psi


@dataclass(frozen=True)
class SpectrumResult:
    """Lowest two eigenpairs plus the full (certified) eigenvalue list.

    ``psi0`` follows a fixed gauge: its largest-magnitude coefficient is
    real and positive.  ``eigenvalues`` holds the full ascending spectrum
    produced by the tridiagonal decomposition.
    """

    e0: float
    e1: float
    gap: float
    psi0: np.ndarray
    psi1: np.ndarray
    residual0: float
    residual1: float
    eigenvalues: np.ndarray


def lowest_two(
    h,
    tol: float = DEFAULT_RESIDUAL_TOL,
    degeneracy_tol: float = DEFAULT_DEGENERACY_TOL,
) -> SpectrumResult:
    """Two lowest eigenpairs of a dense Hermitian matrix.

    Parameters
    ----------
    h : HermitianMatrix or array_like
        Matrix to decompose (validated for Hermiticity).
    tol : float
        Residual acceptance threshold, relative to ``max(1, spectral_scale)``.
    degeneracy_tol : float
        Gap threshold (relative to the spectral scale) below which the
        ground state counts as degenerate and the solver refuses.
    """
    hm = h if isinstance(h, HermitianMatrix) else HermitianMatrix(h)
    n = hm.n
    if n < 2:
        raise ValidationError(f"need a matrix of dimension >= 2, got n={n}")
    scale = spectral_scale(hm)

    form = tridiagonalize(hm)
    w, z = eigh_tridiagonal(form.diag, form.sub, lapack_driver="stev")
    gap = float(w[1] - w[0])
    if gap < degeneracy_tol * max(scale, np.finfo(float).tiny):
        raise DegenerateGroundState(
            f"gap {gap:.3e} below degeneracy threshold "
            f"{degeneracy_tol * scale:.3e} (scale {scale:.3e})"
        )

    vecs = form.apply_q(z[:, :2].astype(np.complex128))
    a = hm.array
    out = []
    residuals = []
    for col, energy in zip(vecs.T, w[:2]):
        psi = col / np.linalg.norm(col)
        res = float(np.linalg.norm(a @ psi - energy * psi))
        if res > tol * max(1.0, scale):
            raise GapboundError(
                f"eigenpair residual {res:.3e} exceeds {tol * max(1.0, scale):.3e}; "
                "decomposition not certified"
            )
        psi = _fix_phase(psi)
        psi.flags.writeable = False
        out.append(psi)
        residuals.append(res)

    w = np.asarray(w, dtype=float)
    w.flags.writeable = False
    return SpectrumResult(
        e0=float(w[0]),
        e1=float(w[1]),
        gap=gap,
        psi0=out[0],
        psi1=out[1],
        residual0=residuals[0],
        residual1=residuals[1],
        eigenvalues=w,
    )


def write_spectrum(result: SpectrumResult, path):
    """Dump the full spectrum as ``<index> <eigenvalue>`` lines."""
    with open(path, "w", newline="\n") as fh:
        for i, e in enumerate(result.eigenvalues):
            fh.write(f"{i} {e:.17g}\n")
