"""One-particle lattice models: declaration, validation, assembly.

Conventions
-----------
Supersites are labeled ``x = 1..L``; each carries ``N0`` internal states
``i = 1..N0``.  The flattened basis index is site-major::

    (x, i)  ->  (x - 1) * N0 + (i - 1)

A model stores every off-diagonal hopping block exactly once, keyed by
the ordered pair ``(x, x')`` with ``x < x'``.  Assembly places the block
at ``(x, x')`` and its conjugate transpose at ``(x', x)``.  On-site
blocks are stored once per site and must be Hermitian.  There is no
implicit "+ h.c." doubling anywhere: what you store is what enters the
matrix.

The strength of the hopping between two supersites is measured by the
spectral norm (largest singular value) of the N0 x N0 block; this equals
the operator norm of the corresponding two-supersite hopping term.
Higher-dimensional geometries are supported by flattening transverse
directions into the internal index (see :func:`strip_model`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, NamedTuple

import numpy as np

from .eigensolver import HermitianMatrix
from .errors import (
    EnvelopeViolation,
    LongRangeHopping,
    NonHermitianError,
    ValidationError,
)

HERMITIAN_TOL = 1e-12


class SiteIndex(NamedTuple):
    """A lattice coordinate and internal index, both 1-based."""

    x: int
    i: int


@dataclass(frozen=True)
class HoppingEnvelope:
    """Exponential envelope dominating all hopping norms.

    A model respects the envelope when every off-diagonal block satisfies
    ``block_norm(x, x') <= cv * exp(-mu * |x - x'|)``.
    """

    cv: float
    mu: float

    def __post_init__(self):
        if not (math.isfinite(self.cv) and self.cv > 0):
            raise ValidationError(f"envelope amplitude must be positive, got {self.cv}")
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise ValidationError(f"envelope decay rate must be positive, got {self.mu}")

    def value(self, distance: float) -> float:
        """Envelope value ``cv * exp(-mu * |distance|)``."""
        return self.cv * math.exp(-self.mu * abs(distance))


@dataclass(frozen=True)
class NNBound:
    """Uniform norm bound ``v0`` for strictly nearest-neighbor hopping."""

    v0: float

    def __post_init__(self):
        if not (math.isfinite(self.v0) and self.v0 >= 0):
            raise ValidationError(f"nearest-neighbor bound must be >= 0, got {self.v0}")


def _as_block(block, n0: int, what: str) -> np.ndarray:
    b = np.array(block, dtype=np.complex128)
    if b.shape != (n0, n0):
        raise ValidationError(f"{what} must have shape ({n0}, {n0}), got {b.shape}")
    if not np.all(np.isfinite(b.view(np.float64))):
        raise ValidationError(f"{what} contains non-finite entries")
    return b


class ModelSpec:
    """Declarative description of a one-particle lattice Hamiltonian.

    Parameters
    ----------
    length : int
        Number of supersites L.
    n0 : int
        Internal dimension per supersite.
    offdiag_blocks : iterable of (x, x', block)
        Hopping blocks with ``x < x'``; each pair at most once.
    onsite_blocks : iterable of (x, block)
        Hermitian on-site blocks, one per site at most.  Blocks that are
        Hermitian within 1e-12 entrywise are symmetrized; anything worse
        is rejected.
    label : str
        Free-form description.
    """

    __slots__ = ("length", "n0", "label", "_offdiag", "_onsite")

    def __init__(
        self,
        length: int,
        n0: int,
        offdiag_blocks: Iterable = (),
        onsite_blocks: Iterable = (),
        label: str = "",
    ):
        if not isinstance(length, (int, np.integer)) or length < 1:
            raise ValidationError(f"length must be a positive integer, got {length!r}")
        if not isinstance(n0, (int, np.integer)) or n0 < 1:
            raise ValidationError(f"n0 must be a positive integer, got {n0!r}")
        object.__setattr__(self, "length", int(length))
        object.__setattr__(self, "n0", int(n0))
        object.__setattr__(self, "label", str(label))

        offdiag: dict[tuple[int, int], np.ndarray] = {}
        for entry in offdiag_blocks:
            x, xp, block = entry
            x, xp = int(x), int(xp)
            if not (1 <= x <= self.length and 1 <= xp <= self.length):
                raise ValidationError(
                    f"hopping pair ({x}, {xp}) out of range 1..{self.length}"
                )
            if x >= xp:
                raise ValidationError(f"hopping pair must have x < x', got ({x}, {xp})")
            if (x, xp) in offdiag:
                raise ValidationError(f"duplicate hopping pair ({x}, {xp})")
            b = _as_block(block, self.n0, f"hopping block ({x}, {xp})")
            b.flags.writeable = False
            offdiag[(x, xp)] = b

        onsite: dict[int, np.ndarray] = {}
        for entry in onsite_blocks:
            x, block = entry
            x = int(x)
            if not 1 <= x <= self.length:
                raise ValidationError(f"on-site coordinate {x} out of range 1..{self.length}")
            if x in onsite:
                raise ValidationError(f"duplicate on-site block at x={x}")
            b = _as_block(block, self.n0, f"on-site block at x={x}")
            dev = np.max(np.abs(b - b.conj().T)) if b.size else 0.0
            if dev > HERMITIAN_TOL:
                raise NonHermitianError(
                    f"on-site block at x={x} deviates from Hermiticity by {dev:.3e}"
                )
            b = 0.5 * (b + b.conj().T)
            b.flags.writeable = False
            onsite[x] = b

        object.__setattr__(self, "_offdiag", offdiag)
        object.__setattr__(self, "_onsite", onsite)

    def __setattr__(self, name, value):
        raise AttributeError("ModelSpec is immutable")

    @property
    def dim(self) -> int:
        """Dimension of the one-particle Hilbert space, L * N0."""
        return self.length * self.n0

    @property
    def offdiag(self):
        """Read-only mapping (x, x') -> hopping block, x < x'."""
        return MappingProxyType(self._offdiag)

    @property
    def onsite(self):
        """Read-only mapping x -> on-site block."""
        return MappingProxyType(self._onsite)

    def flat_index(self, x: int, i: int) -> int:
        """Site-major flat index of basis state (x, i), indices 1-based."""
        if not 1 <= x <= self.length:
            raise ValidationError(f"coordinate {x} out of range 1..{self.length}")
        if not 1 <= i <= self.n0:
            raise ValidationError(f"internal index {i} out of range 1..{self.n0}")
        return (x - 1) * self.n0 + (i - 1)

    def block(self, x: int, xp: int) -> np.ndarray | None:
        """Hopping block from x' to x as placed in the matrix row block x.

        Returns None when the pair carries no hopping.  ``block(x', x)``
        is the conjugate transpose of ``block(x, x')``.
        """
        if x == xp:
            return self._onsite.get(x)
        if x < xp:
            return self._offdiag.get((x, xp))
        b = self._offdiag.get((xp, x))
        return None if b is None else b.conj().T

    def with_shifted_onsite(self, c: float) -> "ModelSpec":
        """New model with ``c * identity`` added to every on-site block."""
        eye = np.eye(self.n0)
        onsite = {x: np.asarray(b) for x, b in self._onsite.items()}
        for x in range(1, self.length + 1):
            onsite[x] = onsite.get(x, np.zeros((self.n0, self.n0))) + c * eye
        return ModelSpec(
            self.length,
            self.n0,
            [(x, xp, b) for (x, xp), b in self._offdiag.items()],
            list(onsite.items()),
            label=self.label,
        )

    def __repr__(self):
        return (
            f"ModelSpec(length={self.length}, n0={self.n0}, "
            f"hoppings={len(self._offdiag)}, onsites={len(self._onsite)}, "
            f"label={self.label!r})"
        )


def assemble(spec: ModelSpec) -> HermitianMatrix:
    """Assemble the dense one-particle matrix of a model.

    The result is Hermitian by construction: every stored hopping block
    is placed once at (x, x') and mirrored by conjugate transposition at
    (x', x); on-site blocks land on the diagonal as given.
    """
    n0 = spec.n0
    m = np.zeros((spec.dim, spec.dim), dtype=np.complex128)
    for (x, xp), b in spec.offdiag.items():
        r = (x - 1) * n0
        c = (xp - 1) * n0
        m[r : r + n0, c : c + n0] = b
        m[c : c + n0, r : r + n0] = b.conj().T
    for x, b in spec.onsite.items():
        r = (x - 1) * n0
        m[r : r + n0, r : r + n0] = b
    return HermitianMatrix(m)


def block_norm(spec: ModelSpec, x: int, xp: int) -> float:
    """Spectral norm of the hopping block between supersites x and x'.

    Symmetric in its arguments; 0.0 when no block is specified.
    """
    if x == xp:
        raise ValidationError("block_norm is defined for distinct supersites only")
    lo, hi = (x, xp) if x < xp else (xp, x)
    b = spec.offdiag.get((lo, hi))
    if b is None:
        return 0.0
    if spec.n0 == 1:
        return float(abs(b[0, 0]))
    return float(np.linalg.svd(b, compute_uv=False)[0])


def fit_envelope(spec: ModelSpec, mu: float) -> HoppingEnvelope:
    """Tightest exponential envelope at decay rate mu.

    Returns ``HoppingEnvelope(cv, mu)`` with
    ``cv = max over pairs of block_norm(x, x') * exp(mu * |x - x'|)``,
    so the envelope holds with equality at the extremal pair.
    """
    if not (math.isfinite(mu) and mu > 0):
        raise ValidationError(f"decay rate mu must be positive, got {mu}")
    if not spec.offdiag:
        raise ValidationError("cannot fit an envelope: model has no hopping blocks")
    cv = max(
        block_norm(spec, x, xp) * math.exp(mu * (xp - x)) for (x, xp) in spec.offdiag
    )
    if cv <= 0:
        raise ValidationError("cannot fit an envelope: all hopping blocks vanish")
    return HoppingEnvelope(cv=cv, mu=mu)


def check_nearest_neighbor(spec: ModelSpec) -> NNBound:
    """Certify strictly nearest-neighbor hopping and return its norm bound.

    Requires exact zeros for every block at distance >= 2 (an all-zero
    stored block counts as zero); raises :class:`LongRangeHopping`
    otherwise.  Near-zero long-range hopping must go through the
    exponential-envelope route instead.
    """
    offenders = [
        (x, xp) for (x, xp), b in spec.offdiag.items() if xp - x >= 2 and b.any()
    ]
    if offenders:
        raise LongRangeHopping(sorted(offenders))
    v0 = 0.0
    for (x, xp) in spec.offdiag:
        if xp - x == 1:
            v0 = max(v0, block_norm(spec, x, xp))
    return NNBound(v0=v0)


def envelope_violations(
    spec: ModelSpec, envelope: HoppingEnvelope, tol: float = 1e-12
) -> list[tuple[int, int, float, float]]:
    """Pairs whose block norm exceeds the declared envelope.

    Returns a list of (x, x', norm, allowed) tuples; empty when the
    envelope dominates every block within ``tol`` relative slack.
    """
    bad = []
    for (x, xp) in spec.offdiag:
        norm = block_norm(spec, x, xp)
        allowed = envelope.value(xp - x)
        if norm > allowed * (1.0 + tol):
            bad.append((x, xp, norm, allowed))
    return sorted(bad)


def require_envelope(spec: ModelSpec, envelope: HoppingEnvelope, tol: float = 1e-12):
    """Raise :class:`EnvelopeViolation` unless the envelope dominates the model."""
    bad = envelope_violations(spec, envelope, tol)
    if bad:
        x, xp, norm, allowed = bad[0]
        raise EnvelopeViolation(
            f"declared envelope (cv={envelope.cv:g}, mu={envelope.mu:g}) does not "
            f"dominate the model: block ({x},{xp}) has norm {norm:.6g} > {allowed:.6g}"
            + (f" ({len(bad)} violating pairs)" if len(bad) > 1 else "")
        )


def impurity_model(length: int, h0: float) -> ModelSpec:
    """Open chain with unit nearest-neighbor hopping and one diagonal defect.

    ``length`` must be even; the chain has ``length + 1`` supersites
    (N0 = 1) so the defect ``h0`` sits exactly at the center site
    ``length // 2 + 1``.
    """
    if not isinstance(length, (int, np.integer)) or length < 2:
        raise ValidationError(f"length must be an integer >= 2, got {length!r}")
    if length % 2 != 0:
        raise ValidationError(f"length must be even, got {length}")
    sites = int(length) + 1
    center = int(length) // 2 + 1
    hops = [(x, x + 1, [[1.0]]) for x in range(1, sites)]
    return ModelSpec(
        sites,
        1,
        hops,
        [(center, [[float(h0)]])],
        label=f"impurity chain (L={length}, h0={h0})",
    )


def strip_model(
    length: int, width: int, t_along: float = 1.0, t_across: float = 1.0
) -> ModelSpec:
    """Flatten a width x length rectangular strip into a chain of supersites.

    Each column of the strip becomes one supersite with N0 = width
    internal states; hopping along the strip couples identical rows of
    adjacent columns, hopping across the strip lives in the on-site
    blocks.
    """
    if width < 1 or length < 1:
        raise ValidationError("strip dimensions must be >= 1")
    across = np.zeros((width, width))
    for i in range(width - 1):
        across[i, i + 1] = across[i + 1, i] = t_across
    hop = t_along * np.eye(width)
    hops = [(x, x + 1, hop) for x in range(1, length)]
    onsites = [(x, across) for x in range(1, length + 1)] if width > 1 else []
    return ModelSpec(
        length, width, hops, onsites, label=f"strip {width}x{length}"
    )
