"""Deterministic fuzzing of the certified-inequality suite.

Every trial draws a random model from one of two families:

* ``"envelope-constrained"``: hopping blocks scaled so their spectral
  norms respect a randomly drawn exponential envelope,
* ``"nearest-neighbor"``: hopping restricted to distance 1 with norms
  below a random uniform bound,

plus random Hermitian on-site blocks, then solves it and asserts the
full invariant suite: the complementary inequality and the agreement of
its two ``<H_OD>`` routes, the gap-based variance bound, the power-law
tail bound, tail monotonicity, weight-gauge invariance, the applicable
exponential tail envelopes, and the trapezoid coupling diagnostic.

Randomness is reproducible by construction: trial ``i`` of seed ``s``
uses an independent PCG64 substream keyed by ``SeedSequence((s, i))``,
so the trial sequence never depends on how many trials ran before.
Identical configurations produce byte-identical reports.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import (
    COMPLEMENTARY_RTOL,
    THEOREM1,
    WeightFunction,
    chebyshev_tail_bound,
    g_expectations,
    theorem1_bound,
    theorem2_bound,
    trapezoid_g,
    variance_upper_bound,
    verify_appendixB,
    verify_envelope,
)
from .eigensolver import lowest_two
from .errors import (
    DegenerateGroundState,
    EnvelopeViolation,
    InvariantViolation,
    ValidationError,
)
from .lattice import (
    HoppingEnvelope,
    ModelSpec,
    NNBound,
    assemble,
    check_nearest_neighbor,
    fit_envelope,
    require_envelope,
)
from .localization import density, position_stats, tail

ENVELOPE_FAMILY = "envelope-constrained"
NN_FAMILY = "nearest-neighbor"
FAMILIES = (ENVELOPE_FAMILY, NN_FAMILY)


@dataclass(frozen=True)
class FuzzConfig:
    """Reproducible fuzz run: identical seed, identical trial sequence."""

    seed: int = 42
    trials: int = 500
    size_range: tuple[int, int] = (4, 40)
    n0_range: tuple[int, int] = (1, 3)
    family: str = ENVELOPE_FAMILY

    def __post_init__(self):
        if self.trials < 1:
            raise ValidationError(f"need at least one trial, got {self.trials}")
        lo, hi = self.size_range
        if not (2 <= lo <= hi):
            raise ValidationError(f"bad size range {self.size_range}")
        lo, hi = self.n0_range
        if not (1 <= lo <= hi):
            raise ValidationError(f"bad internal-dimension range {self.n0_range}")
        if self.family not in FAMILIES:
            raise ValidationError(
                f"unknown family {self.family!r}; choose one of {FAMILIES}"
            )


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent substream for one trial, keyed by (seed, index)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, index))))


def _random_block(rng: np.random.Generator, n0: int, target_norm: float) -> np.ndarray:
    b = rng.normal(size=(n0, n0)) + 1j * rng.normal(size=(n0, n0))
    top = np.linalg.svd(b, compute_uv=False)[0]
    if top == 0.0:
        b = np.eye(n0, dtype=complex)
        top = 1.0
    return b * (target_norm / top)


def random_model(
    rng: np.random.Generator,
    size_range: tuple[int, int] = (4, 40),
    n0_range: tuple[int, int] = (1, 3),
    family: str = ENVELOPE_FAMILY,
):
    """Draw one random model; returns (spec, envelope or None, nn or None)."""
    length = int(rng.integers(size_range[0], size_range[1] + 1))
    n0 = int(rng.integers(n0_range[0], n0_range[1] + 1))
    hops = []
    if family == ENVELOPE_FAMILY:
        env = HoppingEnvelope(cv=float(rng.uniform(0.5, 3.0)), mu=float(rng.uniform(0.4, 1.5)))
        nn = None
        max_d = min(length - 1, 5)
        for x in range(1, length):
            for d in range(1, max_d + 1):
                xp = x + d
                if xp > length:
                    break
                if rng.random() < (0.9 if d == 1 else 0.4):
                    target = float(rng.uniform(0.1, 1.0)) * env.value(d)
                    hops.append((x, xp, _random_block(rng, n0, target)))
    elif family == NN_FAMILY:
        env = None
        nn = NNBound(v0=float(rng.uniform(0.5, 2.0)))
        for x in range(1, length):
            if rng.random() < 0.95:
                target = float(rng.uniform(0.1, 1.0)) * nn.v0
                hops.append((x, x + 1, _random_block(rng, n0, target)))
    else:
        raise ValidationError(f"unknown family {family!r}")
    if not hops:
        target = 0.5 * (env.value(1) if env is not None else nn.v0)
        hops.append((1, 2, _random_block(rng, n0, target)))

    onsites = []
    for x in range(1, length + 1):
        if rng.random() < 0.7:
            a = rng.normal(size=(n0, n0)) + 1j * rng.normal(size=(n0, n0))
            onsites.append((x, float(rng.uniform(0.0, 2.0)) * 0.5 * (a + a.conj().T)))
    return ModelSpec(length, n0, hops, onsites), env, nn


def _random_weight(rng: np.random.Generator, length: int) -> WeightFunction:
    kind = int(rng.integers(0, 4))
    if kind == 0:
        g = rng.normal(size=length) * float(rng.uniform(0.5, 3.0))
    elif kind == 1:
        g = np.cumsum(rng.normal(size=length))
    elif kind == 2:
        g = float(rng.uniform(-2, 2)) * np.arange(1, length + 1) + float(rng.uniform(-5, 5))
    else:
        g = np.full(length, float(rng.uniform(-3, 3)))
    return WeightFunction(g)


def _trial_problems(spec, env, nn, rng) -> list[str] | None:
    """Run all checks on one model; None means skipped (degenerate gap)."""
    try:
        res = lowest_two(assemble(spec))
    except DegenerateGroundState:
        return None
    prof = density(res.psi0, spec)
    stats = position_stats(prof)
    problems: list[str] = []

    g = _random_weight(rng, spec.length)
    rep = g_expectations(res.psi0, spec, g, res.gap)
    tol = COMPLEMENTARY_RTOL * rep.scale
    if rep.slack < -tol:
        problems.append(f"complementary inequality violated (slack={rep.slack:.3e})")
    if rep.agreement > tol:
        problems.append(f"H_OD routes disagree by {rep.agreement:.3e}")

    shifted = g_expectations(
        res.psi0, spec, WeightFunction(g.g + 7.5), res.gap
    )
    if abs(shifted.var_g - rep.var_g) > tol or abs(
        shifted.hod_explicit - rep.hod_explicit
    ) > tol:
        problems.append("weight shift g -> g + c changed var(G) or <H_OD>")
    lam = 2.0
    scaled = g_expectations(res.psi0, spec, WeightFunction(lam * g.g), res.gap)
    if abs(scaled.var_g - lam**2 * rep.var_g) > lam**2 * tol or abs(
        scaled.hod_explicit - lam**2 * rep.hod_explicit
    ) > lam**2 * tol:
        problems.append("weight scaling g -> lam*g did not scale by lam^2")

    src = env if env is not None else nn
    vb = variance_upper_bound(src, spec.length, res.gap)
    if stats.variance > vb * (1.0 + 1e-9) + 1e-12:
        problems.append(f"variance bound violated ({stats.variance:.6g} > {vb:.6g})")
    for k in (1.0, 2.0, 5.0):
        r = k * max(stats.delta_x, 0.5)
        cb = chebyshev_tail_bound(src, spec.length, res.gap, r)
        if tail(prof, stats.mean, r) > cb + 1e-12:
            problems.append(f"power-law tail bound violated at R={r:.3g}")

    r_max = max(stats.mean - 1.0, spec.length - stats.mean)
    tails = np.array(
        [tail(prof, stats.mean, r) for r in np.arange(0.0, r_max + 0.25, 0.25)]
    )
    if np.any(np.diff(tails) > 1e-12):
        problems.append("tail distribution is not monotone nonincreasing")

    fitted = env if env is not None else fit_envelope(spec, mu=1.0)
    b1 = theorem1_bound(fitted, res.gap, 0.5, stats.delta_x)
    if not verify_envelope(prof, stats.mean, b1).ok:
        problems.append("theorem1 envelope violated")
    if nn is not None and nn.v0 > 0:
        b2 = theorem2_bound(nn.v0, res.gap, 0.5, stats.delta_x)
        if not verify_envelope(prof, stats.mean, b2).ok:
            problems.append("theorem2 envelope violated")

    r_inner = float(rng.uniform(0.0, spec.length / 4.0))
    delta_r = float(rng.uniform(3.2, max(4.2, spec.length / 3.0)))
    gtrap = trapezoid_g(spec.length, stats.mean, r_inner, delta_r, THEOREM1)
    try:
        verify_appendixB(
            spec, fitted, gtrap, res.psi0, (r_inner, delta_r, stats.mean)
        )
    except InvariantViolation as exc:
        problems.append(f"trapezoid coupling bound failed: {exc}")
    return problems


@dataclass(frozen=True)
class FuzzReport:
    config: FuzzConfig
    passed: int
    skipped_degenerate: int
    failures: tuple[tuple[int, str], ...]

    @property
    def first_failure(self) -> tuple[int, str] | None:
        return self.failures[0] if self.failures else None

    def format(self) -> str:
        c = self.config
        lines = [
            "fuzz report",
            f"seed:    {c.seed}",
            f"family:  {c.family}",
            f"sizes:   L in {list(c.size_range)}, N0 in {list(c.n0_range)}",
            f"trials:  {c.trials} (passed {self.passed}, "
            f"skipped {self.skipped_degenerate} degenerate, "
            f"failed {len(self.failures)})",
        ]
        if self.failures:
            i, msg = self.failures[0]
            lines.append(f"status:  FAIL at trial {i}: {msg}")
            lines.append(f"reproduce: FuzzConfig(seed={c.seed}, trials={i + 1}, "
                         f"size_range={c.size_range}, n0_range={c.n0_range}, "
                         f"family={c.family!r}), trial index {i}")
        else:
            lines.append("status:  OK")
        return "\n".join(lines) + "\n"


def run_fuzz(config: FuzzConfig, model_factory=None) -> FuzzReport:
    """Run the fuzz schedule; aborts on the first invariant failure.

    ``model_factory(rng) -> (spec, envelope, nn)`` may override the
    default family generator.  Declared envelopes and nearest-neighbor
    bounds are validated before any theorem check: a factory whose
    declaration does not dominate its own blocks is rejected with
    :class:`EnvelopeViolation` rather than reported as a theorem failure.
    """
    factory = model_factory or (
        lambda rng: random_model(rng, config.size_range, config.n0_range, config.family)
    )
    passed = 0
    skipped = 0
    for i in range(config.trials):
        rng = trial_rng(config.seed, i)
        spec, env, nn = factory(rng)
        if env is not None:
            require_envelope(spec, env)
        if nn is not None:
            actual = check_nearest_neighbor(spec).v0
            if actual > nn.v0 * (1.0 + 1e-12):
                raise EnvelopeViolation(
                    f"declared nearest-neighbor bound v0={nn.v0:g} below actual "
                    f"maximum norm {actual:g}"
                )
        problems = _trial_problems(spec, env, nn, rng)
        if problems is None:
            skipped += 1
            continue
        if problems:
            report = FuzzReport(
                config=config,
                passed=passed,
                skipped_degenerate=skipped,
                failures=((i, "; ".join(problems)),),
            )
            raise InvariantViolation(
                f"fuzz trial {i} failed (seed={config.seed}, family={config.family}): "
                + "; ".join(problems)
                + f"; reproduce with seed={config.seed}, trial index {i}",
                report=report,
            )
        passed += 1
    return FuzzReport(
        config=config, passed=passed, skipped_degenerate=skipped, failures=()
    )
