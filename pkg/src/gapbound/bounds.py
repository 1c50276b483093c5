"""Rigorous localization bounds for gapped one-particle ground states.

Everything here revolves around one complementary inequality.  For any
real site weight ``g(x)`` define the diagonal operator
``G = sum_x g(x) sum_i |x,i><x,i|`` and the reweighted hopping operator

    H_OD[(x,i),(x',j)] = (g(x) - g(x'))^2 * H[(x,i),(x',j)],   x != x'.

On a non-degenerate ground state the spectral gap and the variance of G
obey ``gap * var(G) <= |<H_OD>| / 2``.  The expectation ``<H_OD>`` can be
computed two independent ways: directly as the weighted pair sum, or as
``<[G, [G, H]]>`` via matrix commutators; both are recorded and must
agree.  (On the ground state the signed value is never positive; the
absolute value is what enters the inequality.)

Three tail bounds for ``P(|x - <x>| >= R)`` are derived from it:

* ``chebyshev_tail_bound``: a power law ``max_x V_x / (2 R^2 gap)`` with
  ``V_x = 2 sum_x' V(x - x') (x - x')^2``, using ``g(x) = x``.
* ``theorem1_bound``: an exponential envelope valid for any hopping
  dominated by ``cv * exp(-mu |x - x'|)``, built from trapezoid weights
  with ramp width ``delta_r / 3`` (see :func:`trapezoid_g`).
* ``theorem2_bound``: a tighter exponential envelope for strictly
  nearest-neighbor hopping, built from unit-slope trapezoid weights with
  plateau ``delta_r - 2``.

Both exponential envelopes have the form
``prefactor * exp(-(R - r1) / xi)`` for ``R >= r1``, with an onset radius
``r1`` proportional to the position spread and a decay length ``xi``
scaling as ``gap^(-1/2)``.  ``verify_envelope`` checks a measured tail
against an envelope pointwise; ``verify_appendixB`` checks the piecewise
exponential bound on the trapezoid-weighted coupling strength that the
general envelope rests on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvariantViolation, ValidationError
from .eigensolver import spectral_scale
from .lattice import (
    HoppingEnvelope,
    ModelSpec,
    NNBound,
    assemble,
    block_norm,
    require_envelope,
)
from .localization import DensityProfile, density, tail

_E = math.e

DEFAULT_ENVELOPE_TOL = 1e-12
COMPLEMENTARY_RTOL = 1e-9
THEOREM1 = "theorem1"
THEOREM2 = "theorem2"


@dataclass(frozen=True)
class WeightFunction:
    """Real site weight g tabulated on x = 1..L."""

    g: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g, dtype=float)
        if g.ndim != 1 or g.size == 0:
            raise ValidationError("weight function must be a nonempty 1-d array")
        if not np.all(np.isfinite(g)):
            raise ValidationError("weight function contains non-finite values")
        g = g.copy()
        g.flags.writeable = False
        object.__setattr__(self, "g", g)

    @property
    def length(self) -> int:
        return self.g.shape[0]


def position_weight(length: int) -> WeightFunction:
    """The weight g(x) = x, turning G into the position operator."""
    return WeightFunction(np.arange(1, length + 1, dtype=float))


def trapezoid_g(
    length: int,
    center: float,
    r_inner: float,
    delta_r: float,
    variant: str = THEOREM1,
) -> WeightFunction:
    """Radial trapezoid weight used by the exponential envelope proofs.

    With ``u = |x - center|``:

    * ``"theorem1"`` (requires delta_r > 3): zero for
      ``u <= r_inner + delta_r/3``, unit-slope ramp up to the plateau
      value ``delta_r/3`` reached at ``u = r_inner + 2*delta_r/3``.
    * ``"theorem2"`` (requires delta_r > 2): zero for
      ``u <= r_inner + 1``, unit-slope ramp up to the plateau value
      ``delta_r - 2`` reached at ``u = r_inner + delta_r - 1``.
    """
    if length < 1:
        raise ValidationError("length must be >= 1")
    if r_inner < 0:
        raise ValidationError(f"r_inner must be >= 0, got {r_inner}")
    u = np.abs(np.arange(1, length + 1, dtype=float) - center)
    if variant == THEOREM1:
        if not delta_r > 3:
            raise ValidationError(
                f"theorem1 trapezoid needs delta_r > 3, got {delta_r}"
            )
        g = np.clip(u - (r_inner + delta_r / 3.0), 0.0, delta_r / 3.0)
    elif variant == THEOREM2:
        if not delta_r > 2:
            raise ValidationError(
                f"theorem2 trapezoid needs delta_r > 2, got {delta_r}"
            )
        g = np.clip(u - (r_inner + 1.0), 0.0, delta_r - 2.0)
    else:
        raise ValidationError(f"unknown trapezoid variant {variant!r}")
    return WeightFunction(g)


@dataclass(frozen=True)
class ComplementaryReport:
    """Both sides of ``gap * var(G) <= |<H_OD>| / 2`` plus diagnostics.

    ``hod_explicit`` is the weighted pair sum, ``hod_commutator`` the
    matrix-commutator evaluation of the same quantity; both are signed
    (non-positive on a ground state).  ``slack = rhs - lhs`` must be
    >= ``-1e-9 * scale``.
    """

    mean_g: float
    mean_g2: float
    var_g: float
    hod_explicit: float
    hod_commutator: float
    lhs: float
    rhs: float
    slack: float
    scale: float

    @property
    def agreement(self) -> float:
        return abs(self.hod_explicit - self.hod_commutator)

    @property
    def ok(self) -> bool:
        tol = COMPLEMENTARY_RTOL * self.scale
        return self.slack >= -tol and self.agreement <= tol


def _hod_explicit(psi: np.ndarray, spec: ModelSpec, gvals: np.ndarray) -> float:
    """<H_OD> as 2 * sum over stored pairs of (g(x)-g(x'))^2 Re(a_x^dag h a_x')."""
    n0 = spec.n0
    acc = 0.0
    for (x, xp), b in spec.offdiag.items():
        dg = gvals[x - 1] - gvals[xp - 1]
        if dg == 0.0:
            continue
        ax = psi[(x - 1) * n0 : x * n0]
        axp = psi[(xp - 1) * n0 : xp * n0]
        acc += 2.0 * dg * dg * float(np.real(np.vdot(ax, b @ axp)))
    return acc


def g_expectations(
    psi0: np.ndarray,
    spec: ModelSpec,
    g: WeightFunction,
    delta_e0: float,
) -> ComplementaryReport:
    """Evaluate the complementary inequality for one (model, weight) pair.

    ``<H_OD>`` is computed twice: from the stored hopping blocks and from
    the double commutator ``[G, [G, H]]`` on the assembled matrix.
    """
    if g.length != spec.length:
        raise ValidationError(
            f"weight function has {g.length} sites, model has {spec.length}"
        )
    psi = np.asarray(psi0, dtype=np.complex128)
    prof = density(psi, spec)
    gx = g.g
    p = prof.p
    mean_g = float(np.dot(gx, p))
    mean_g2 = float(np.dot(gx * gx, p))
    var_g = float(np.dot((gx - mean_g) ** 2, p))

    hod_explicit = _hod_explicit(psi, spec, gx)

    h = assemble(spec).array
    gfull = np.repeat(gx, spec.n0)
    gm = np.diag(gfull.astype(np.complex128))
    comm = gm @ h - h @ gm
    comm2 = gm @ comm - comm @ gm
    hod_commutator = float(np.real(np.vdot(psi, comm2 @ psi)))

    lhs = delta_e0 * var_g
    rhs = abs(hod_explicit) / 2.0
    scale = spectral_scale(h) * max(1.0, float(np.max(np.abs(gx)))) ** 2
    return ComplementaryReport(
        mean_g=mean_g,
        mean_g2=mean_g2,
        var_g=var_g,
        hod_explicit=hod_explicit,
        hod_commutator=hod_commutator,
        lhs=lhs,
        rhs=rhs,
        slack=rhs - lhs,
        scale=scale,
    )


def c1_constant(envelope: HoppingEnvelope) -> float:
    """Coupling constant ``4 cv sum_{k>=0} (k+1)^2 exp(-mu k)``.

    Evaluated in closed form ``4 cv (1+q) / (1-q)^3`` with
    ``q = exp(-mu)``.
    """
    q = math.exp(-envelope.mu)
    return 4.0 * envelope.cv * (1.0 + q) / (1.0 - q) ** 3


def site_coupling_profile(source, length: int | None = None) -> np.ndarray:
    """Per-site coupling strength ``V_x = 2 sum_x' V(x - x') (x - x')^2``.

    ``source`` selects the pair-strength function V:

    * :class:`HoppingEnvelope`: ``V(r) = cv * exp(-mu |r|)``,
    * :class:`NNBound`: ``V(1) = v0``, zero beyond,
    * :class:`ModelSpec`: the raw block norms (tightness comparison).
    """
    if isinstance(source, ModelSpec):
        v = np.zeros(source.length)
        for (x, xp) in source.offdiag:
            w = 2.0 * block_norm(source, x, xp) * (xp - x) ** 2
            v[x - 1] += w
            v[xp - 1] += w
        return v
    if length is None or length < 1:
        raise ValidationError("a positive lattice length is required")
    if isinstance(source, HoppingEnvelope):
        x = np.arange(length, dtype=float)
        d = np.abs(x[:, None] - x[None, :])
        return 2.0 * np.sum(source.cv * np.exp(-source.mu * d) * d * d, axis=1)
    if isinstance(source, NNBound):
        counts = np.full(length, 2.0)
        counts[0] = counts[-1] = 1.0
        if length == 1:
            counts[0] = 0.0
        return 2.0 * source.v0 * counts
    raise ValidationError(f"unsupported coupling source {type(source).__name__}")


def variance_upper_bound(source, length: int, delta_e0: float) -> float:
    """Gap-based bound on the position variance: ``max_x V_x / (2 gap)``."""
    if not delta_e0 > 0:
        raise ValidationError(f"spectral gap must be positive, got {delta_e0}")
    return float(np.max(site_coupling_profile(source, length))) / (2.0 * delta_e0)


def chebyshev_tail_bound(source, length: int, delta_e0: float, r: float) -> float:
    """Power-law tail bound ``min(1, max_x V_x / (2 R^2 gap))``."""
    if not r > 0:
        raise ValidationError(f"radius must be positive, got {r}")
    return min(1.0, variance_upper_bound(source, length, delta_e0) / (r * r))


def _check_bound_params(delta_e0: float, s: float, delta_x: float):
    if not delta_e0 > 0:
        raise ValidationError(f"spectral gap must be positive, got {delta_e0}")
    if not 0.0 < s < 1.0:
        raise ValidationError(f"parameter s must lie in (0, 1), got {s}")
    if not (math.isfinite(delta_x) and delta_x >= 0):
        raise ValidationError(f"position spread must be >= 0, got {delta_x}")


@dataclass(frozen=True)
class Theorem1Bound:
    """Exponential tail envelope for exponentially dominated hopping.

    ``prefactor * exp(-(R - r1) / xi1)`` bounds the tail for
    ``R >= r1 = sqrt((2e+1)/(1-s)) * delta_x`` with

        xi1 = max( (3/2) sqrt((4e^2+1) c1 / (e s gap)),  3 ln(2e) / mu ).
    """

    s: float
    c1: float
    r1: float
    xi1: float
    prefactor: float
    delta_e0: float
    delta_x: float

    kind = THEOREM1

    @property
    def xi(self) -> float:
        return self.xi1

    @property
    def amplitude(self) -> float:
        return self.c1

    def evaluate(self, r) -> np.ndarray | float:
        """Envelope value at radius r (defined for r >= r1)."""
        r = np.asarray(r, dtype=float)
        if np.any(r < self.r1 - 1e-9):
            raise ValidationError(f"envelope defined for R >= r1 = {self.r1:g}")
        out = self.prefactor * np.exp(-(r - self.r1) / self.xi1)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Theorem2Bound:
    """Exponential tail envelope for strictly nearest-neighbor hopping.

    ``prefactor * exp(-(R - r1) / xi2)`` bounds the tail for
    ``R >= r1 = sqrt((e+1)/(1-s)) * delta_x`` with
    ``xi2 = sqrt(e v0 / (s gap)) + 2``.
    """

    s: float
    v0: float
    r1: float
    xi2: float
    prefactor: float
    delta_e0: float
    delta_x: float

    kind = THEOREM2

    @property
    def xi(self) -> float:
        return self.xi2

    @property
    def amplitude(self) -> float:
        return self.v0

    def evaluate(self, r) -> np.ndarray | float:
        """Envelope value at radius r (defined for r >= r1)."""
        r = np.asarray(r, dtype=float)
        if np.any(r < self.r1 - 1e-9):
            raise ValidationError(f"envelope defined for R >= r1 = {self.r1:g}")
        out = self.prefactor * np.exp(-(r - self.r1) / self.xi2)
        return float(out) if out.ndim == 0 else out


def theorem1_bound(
    envelope: HoppingEnvelope, delta_e0: float, s: float, delta_x: float
) -> Theorem1Bound:
    """Exponential tail envelope from an exponential hopping envelope."""
    _check_bound_params(delta_e0, s, delta_x)
    c1 = c1_constant(envelope)
    r1 = math.sqrt((2.0 * _E + 1.0) / (1.0 - s)) * delta_x
    xi1 = max(
        1.5 * math.sqrt((4.0 * _E * _E + 1.0) * c1 / (_E * s * delta_e0)),
        3.0 * math.log(2.0 * _E) / envelope.mu,
    )
    prefactor = (2.0 * _E * (2.0 - s) + 1.0) / (4.0 * (2.0 * _E + 1.0))
    return Theorem1Bound(
        s=s, c1=c1, r1=r1, xi1=xi1, prefactor=prefactor,
        delta_e0=delta_e0, delta_x=delta_x,
    )


def theorem2_bound(
    v0: float, delta_e0: float, s: float, delta_x: float
) -> Theorem2Bound:
    """Exponential tail envelope for nearest-neighbor hopping of norm <= v0."""
    _check_bound_params(delta_e0, s, delta_x)
    if not v0 > 0:
        raise ValidationError(f"nearest-neighbor amplitude must be positive, got {v0}")
    r1 = math.sqrt((_E + 1.0) / (1.0 - s)) * delta_x
    xi2 = math.sqrt(_E * v0 / (s * delta_e0)) + 2.0
    prefactor = _E * (1.0 - s) / (_E + 1.0)
    return Theorem2Bound(
        s=s, v0=v0, r1=r1, xi2=xi2, prefactor=prefactor,
        delta_e0=delta_e0, delta_x=delta_x,
    )


@dataclass(frozen=True)
class EnvelopeCheck:
    """Pointwise comparison of a measured tail against an envelope."""

    r_grid: np.ndarray
    bound_values: np.ndarray
    tail_values: np.ndarray
    violations: np.ndarray
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.violations.size == 0


def verify_envelope(
    profile: DensityProfile,
    mean: float,
    bound,
    grid_step: float = 0.5,
    tolerance: float = DEFAULT_ENVELOPE_TOL,
) -> EnvelopeCheck:
    """Check ``tail(R) <= envelope(R) + tolerance`` on a radius grid.

    The grid runs from the onset radius ``r1`` (or from ``grid_step``
    when r1 = 0: at R = 0 the tail is identically 1 and carries no
    information) up to the maximum lattice distance from ``mean``.
    Violations are returned as data, not raised.
    """
    if not grid_step > 0:
        raise ValidationError(f"grid step must be positive, got {grid_step}")
    r_max = max(mean - 1.0, profile.length - mean)
    start = bound.r1 if bound.r1 > 0 else grid_step
    if start > r_max:
        empty = np.array([])
        return EnvelopeCheck(empty, empty, empty, empty, tolerance)
    grid = np.arange(start, r_max + 1e-9 * grid_step, grid_step)
    bound_values = np.asarray(bound.evaluate(grid), dtype=float)
    tail_values = np.array([tail(profile, mean, r) for r in grid])
    violations = grid[tail_values > bound_values + tolerance]
    for arr in (grid, bound_values, tail_values, violations):
        arr.flags.writeable = False
    return EnvelopeCheck(grid, bound_values, tail_values, violations, tolerance)


@dataclass(frozen=True)
class AppendixBReport:
    """Both sides of the trapezoid-weighted coupling bound.

    ``hod_abs <= bound_direct <= bound_piecewise`` must hold within
    ``1e-9 * c1``; ``pointwise_margin`` is the worst-case slack of the
    piecewise bound over the direct per-site coupling.
    """

    hod_abs: float
    bound_direct: float
    bound_piecewise: float
    pointwise_margin: float
    c1: float
    region: tuple[float, float, float]

    @property
    def tolerance(self) -> float:
        return COMPLEMENTARY_RTOL * self.c1

    @property
    def ok(self) -> bool:
        tol = self.tolerance
        return (
            self.hod_abs <= self.bound_direct + tol
            and self.bound_direct <= self.bound_piecewise + tol
            and self.pointwise_margin >= -tol
        )


def verify_appendixB(
    spec: ModelSpec,
    envelope: HoppingEnvelope,
    g: WeightFunction,
    psi0: np.ndarray,
    region: tuple[float, float, float],
) -> AppendixBReport:
    """Diagnostic check of the piecewise coupling bound behind theorem1.

    ``region = (r_inner, delta_r, center)`` must describe the trapezoid
    that produced ``g`` (theorem1 variant).  With ``u = |x - center|``
    the per-site coupling ``V_{g,x} = 2 sum_x' (g(x)-g(x'))^2 V(x-x')``
    is bounded by::

        c1 * exp(-mu (r_inner + delta_r/3 - u))   inside the zero region,
        c1                                        in the ramp band,
        c1 * exp(-mu (u - r_inner - 2 delta_r/3)) beyond the ramp,

    and ``|<H_OD>| <= sum_x V_{g,x} p_x`` for any model the envelope
    dominates.  Raises :class:`InvariantViolation` if either stage fails.
    """
    r_inner, delta_r, center = region
    expected = trapezoid_g(spec.length, center, r_inner, delta_r, THEOREM1)
    if g.length != spec.length or np.max(np.abs(g.g - expected.g)) > 1e-9 * max(
        1.0, delta_r
    ):
        raise ValidationError(
            "mismatched g shape: weight function does not match the "
            f"theorem1 trapezoid for region (r_inner={r_inner}, "
            f"delta_r={delta_r}, center={center})"
        )
    require_envelope(spec, envelope)

    psi = np.asarray(psi0, dtype=np.complex128)
    prof = density(psi, spec)
    gx = g.g
    hod_abs = abs(_hod_explicit(psi, spec, gx))

    x = np.arange(1, spec.length + 1, dtype=float)
    d = np.abs(x[:, None] - x[None, :])
    dg2 = (gx[:, None] - gx[None, :]) ** 2
    v_direct = 2.0 * np.sum(dg2 * envelope.cv * np.exp(-envelope.mu * d), axis=1)

    c1 = c1_constant(envelope)
    u = np.abs(x - center)
    a = r_inner + delta_r / 3.0
    b = r_inner + 2.0 * delta_r / 3.0
    v_piece = np.where(
        u <= a,
        c1 * np.exp(-envelope.mu * (a - u)),
        np.where(u <= b, c1, c1 * np.exp(-envelope.mu * (u - b))),
    )

    report = AppendixBReport(
        hod_abs=hod_abs,
        bound_direct=float(np.dot(v_direct, prof.p)),
        bound_piecewise=float(np.dot(v_piece, prof.p)),
        pointwise_margin=float(np.min(v_piece - v_direct)),
        c1=c1,
        region=(float(r_inner), float(delta_r), float(center)),
    )
    if not report.ok:
        raise InvariantViolation(
            "trapezoid coupling bound failed: "
            f"|<H_OD>|={report.hod_abs:.6g}, direct={report.bound_direct:.6g}, "
            f"piecewise={report.bound_piecewise:.6g}, "
            f"pointwise margin={report.pointwise_margin:.3e}",
            report=report,
        )
    return report


def best_s(
    kind: str,
    delta_e0: float,
    delta_x: float,
    r: float,
    envelope: HoppingEnvelope | None = None,
    v0: float | None = None,
    grid: np.ndarray | None = None,
):
    """Grid search for the s minimizing the envelope value at radius r.

    Only s values whose onset radius satisfies ``r1(s) <= r`` are
    feasible.  Returns ``(s, bound)`` where ``bound`` is the envelope
    built with the winning s.
    """
    if grid is None:
        grid = np.arange(0.05, 0.951, 0.05)
    best = None
    for s in grid:
        s = float(s)
        if kind == THEOREM1:
            if envelope is None:
                raise ValidationError("theorem1 search needs a hopping envelope")
            b = theorem1_bound(envelope, delta_e0, s, delta_x)
        elif kind == THEOREM2:
            if v0 is None:
                raise ValidationError("theorem2 search needs a nearest-neighbor bound")
            b = theorem2_bound(v0, delta_e0, s, delta_x)
        else:
            raise ValidationError(f"unknown bound kind {kind!r}")
        if b.r1 > r:
            continue
        value = b.evaluate(r)
        if best is None or value < best[0]:
            best = (value, s, b)
    if best is None:
        raise ValidationError(
            f"no s in the grid has onset radius r1 <= {r:g}; increase r"
        )
    return best[1], best[2]


def write_bound_csv(bounds, path):
    """Dump envelope-bound parameters, one row per bound."""
    with open(path, "w", newline="\n") as fh:
        fh.write("kind,s,r1,xi,prefactor,C1_or_V0,deltaE0,deltaX\n")
        for b in bounds:
            fh.write(
                f"{b.kind},{b.s:.17g},{b.r1:.17g},{b.xi:.17g},{b.prefactor:.17g},"
                f"{b.amplitude:.17g},{b.delta_e0:.17g},{b.delta_x:.17g}\n"
            )


def write_envelope_csv(check: EnvelopeCheck, path):
    """Dump an envelope check as ``R,tail,bound,violation`` rows."""
    violating = set(np.asarray(check.violations).tolist())
    with open(path, "w", newline="\n") as fh:
        fh.write("R,tail,bound,violation\n")
        for r, t, b in zip(check.r_grid, check.tail_values, check.bound_values):
            fh.write(f"{r:.17g},{t:.17g},{b:.17g},{int(r in violating)}\n")
