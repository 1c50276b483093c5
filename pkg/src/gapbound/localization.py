"""Spatial statistics of a ground-state vector.

The particle density per supersite is ``p_x = sum_i |psi[(x, i)]|^2``.
From it we derive the mean position, the position variance, the tail
distribution ``P(|x - <x>| >= R)`` and a least-squares estimate of the
exponential decay length of ``p_x``.

Distances are always measured from the real-valued mean position over
the integer site coordinates; no re-indexing takes place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientData, NonDecaying, ValidationError
from .lattice import ModelSpec

DENSITY_SUM_TOL = 1e-12
DEFAULT_FLOOR = 1e-13
DEFAULT_BOUNDARY_MARGIN = 10


@dataclass(frozen=True)
class DensityProfile:
    """Probability per supersite, indexed by x = 1..L; sums to one."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValidationError("density profile must be a nonempty 1-d array")
        if np.min(p) < -1e-15:
            raise ValidationError(f"negative density entry {np.min(p):.3e}")
        p = np.maximum(p, 0.0)
        total = float(p.sum())
        if abs(total - 1.0) > DENSITY_SUM_TOL:
            raise ValidationError(f"density sums to {total!r}, expected 1 within 1e-12")
        p.flags.writeable = False
        object.__setattr__(self, "p", p)

    @property
    def length(self) -> int:
        return self.p.shape[0]

    def sites(self) -> np.ndarray:
        """Integer site coordinates 1..L."""
        return np.arange(1, self.length + 1, dtype=float)


@dataclass(frozen=True)
class PositionStats:
    """Mean and variance of the position over a density profile."""

    mean: float
    variance: float

    @property
    def delta_x(self) -> float:
        """Standard deviation of the position."""
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class DecayFit:
    """Least-squares fit of ``ln p_x = intercept - |x - center| / xi_fit``."""

    xi_fit: float
    intercept: float
    r_squared: float
    window: tuple[float, float]


def density(psi0: np.ndarray, spec: ModelSpec) -> DensityProfile:
    """Particle density per supersite from a normalized coefficient vector."""
    psi = np.asarray(psi0, dtype=np.complex128)
    if psi.ndim != 1 or psi.size != spec.dim:
        raise ValidationError(
            f"coefficient vector has size {psi.size}, model needs {spec.dim}"
        )
    nrm = float(np.linalg.norm(psi))
    if abs(nrm - 1.0) > 1e-10:
        raise ValidationError(f"coefficient vector norm is {nrm!r}, expected 1")
    p = np.abs(psi.reshape(spec.length, spec.n0)) ** 2
    return DensityProfile(p=p.sum(axis=1))


def position_stats(profile: DensityProfile) -> PositionStats:
    """Mean position and position variance of a profile."""
    x = profile.sites()
    mean = float(np.dot(x, profile.p))
    variance = float(np.dot((x - mean) ** 2, profile.p))
    return PositionStats(mean=mean, variance=max(variance, 0.0))


def tail(profile: DensityProfile, mean: float, r: float) -> float:
    """Tail probability ``P(|x - mean| >= r)`` over the integer sites."""
    x = profile.sites()
    mask = np.abs(x - mean) >= r
    return float(profile.p[mask].sum())


def fit_localization_length(
    profile: DensityProfile,
    center: float,
    floor: float = DEFAULT_FLOOR,
    boundary_margin: int = DEFAULT_BOUNDARY_MARGIN,
) -> DecayFit:
    """Fit the exponential decay length of a density profile.

    Points below ``floor`` (numerical noise) and within
    ``boundary_margin`` sites of either open edge are excluded; both
    sides of ``center`` are fitted jointly against the distance
    ``|x - center|``.

    Raises
    ------
    InsufficientData
        Fewer than 4 usable points.
    NonDecaying
        The fitted slope is not negative.
    """
    p = profile.p
    length = profile.length
    x = profile.sites()
    usable = (p >= floor) & (x > boundary_margin) & (x <= length - boundary_margin)
    if int(usable.sum()) < 4:
        raise InsufficientData(
            f"only {int(usable.sum())} usable points (need >= 4); "
            f"floor={floor:g}, boundary_margin={boundary_margin}"
        )
    d = np.abs(x[usable] - center)
    y = np.log(p[usable])
    if np.ptp(y) == 0.0:
        raise NonDecaying("profile is exactly flat over the fit window")
    slope, intercept = np.polyfit(d, y, 1)
    if slope >= 0:
        raise NonDecaying(f"fitted slope {slope:.3e} is not negative")
    resid = y - (slope * d + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 0.0
    return DecayFit(
        xi_fit=-1.0 / float(slope),
        intercept=float(intercept),
        r_squared=r_squared,
        window=(float(d.min()), float(d.max())),
    )


def write_profile_csv(profile: DensityProfile, path):
    """Dump a profile as ``x,p_x`` rows."""
    with open(path, "w", newline="\n") as fh:
        fh.write("x,p_x\n")
        for x, p in zip(range(1, profile.length + 1), profile.p):
            fh.write(f"{x},{p:.17g}\n")


def write_fit_csv(fit: DecayFit, path):
    """Dump a decay fit as a single CSV row."""
    with open(path, "w", newline="\n") as fh:
        fh.write("xi_fit,intercept,r_squared,window_lo,window_hi\n")
        fh.write(
            f"{fit.xi_fit:.17g},{fit.intercept:.17g},{fit.r_squared:.17g},"
            f"{fit.window[0]:.17g},{fit.window[1]:.17g}\n"
        )
