"""Exact outcome certificates and their strategy-blind verifiers.

A certificate freezes the claim a finished run makes about its outcome
interval, together with a snapshot of the inputs that determined the
schedule constants.  Verification re-derives every constant from the
snapshot alone and then checks the claim by exhaustive rational
arithmetic, so a hand-edited certificate fails closed even when the
edited claim happens to be true.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .alice import BiLipschitzMap, LacunarySpec
from .errors import HorizonMismatch, SpecError
from .fractal import DecayParams, DimensionEstimate, MeasureAuditReport
from .numerics import (Exponent, LogRatio, Ordering, circle_dist,
                       circle_dist_range, exponent_cmp, floor_sqrt,
                       fractions_in_interval, make_exponent, parse_rational)

ORBIT_SEPARATION = "orbit_separation"
BAD_APPROX = "bad_approx"

DEFAULT_MAX_Q = 10 ** 6


# ---------------------------------------------------------------------------
# exponent serialization, shared with the CLI


def exponent_to_json(e: Exponent):
    """A rational exponent as "p/q", a log ratio as {"log": [top, base]}."""
    if isinstance(e, LogRatio):
        return {"log": [str(e.top), str(e.base)]}
    return str(Fraction(e))


def exponent_from_json(data) -> Exponent:
    if isinstance(data, dict):
        top, base = data["log"]
        return make_exponent(parse_rational(top), parse_rational(base))
    return parse_rational(data)


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class Certificate:
    """A separation claim over an interval.

    kind "orbit_separation": every x in the interval keeps circle distance
    at least c between t_n * phi^{-1}(x) and the target y_n for every term
    the horizon covers.  kind "bad_approx": phi^{-1}(x) stays farther than
    c/q^2 from every reduced p/q with q <= Q for the horizon's Q.

    The horizon counts finished schedule blocks when the snapshot carries
    schedule inputs ("blocks"), otherwise raw terms or denominators.
    """

    kind: str
    interval: Tuple[Fraction, Fraction]
    c: Fraction
    horizon: int
    horizon_kind: str = "blocks"
    snapshot: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in (ORBIT_SEPARATION, BAD_APPROX):
            raise SpecError("unknown certificate kind %r" % (self.kind,))
        lo, hi = self.interval
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise SpecError("certificate interval is reversed")
        object.__setattr__(self, "interval", (lo, hi))
        object.__setattr__(self, "c", Fraction(self.c))
        if self.c <= 0:
            raise SpecError("separation constant must be positive")
        if self.horizon < 0 or self.horizon != int(self.horizon):
            raise SpecError("horizon must be a non-negative integer")
        allowed = ("blocks", "terms") if self.kind == ORBIT_SEPARATION \
            else ("blocks", "denominators")
        if self.horizon_kind not in allowed:
            raise SpecError("horizon kind %r does not fit %s"
                            % (self.horizon_kind, self.kind))

    def to_json(self) -> dict:
        return {"kind": self.kind,
                "interval": [str(self.interval[0]), str(self.interval[1])],
                "c": str(self.c),
                "horizon": self.horizon,
                "horizon_kind": self.horizon_kind,
                "snapshot": self.snapshot}

    @classmethod
    def from_json(cls, data: dict) -> "Certificate":
        lo, hi = data["interval"]
        return cls(data["kind"], (parse_rational(lo), parse_rational(hi)),
                   parse_rational(data["c"]), int(data["horizon"]),
                   data.get("horizon_kind", "blocks"),
                   dict(data.get("snapshot") or {}))


def _schedule_snapshot(state, phi: BiLipschitzMap) -> dict:
    return {"alpha": str(state.alpha), "beta": str(state.beta),
            "rho_prime": str(state.rho_prime), "rho0": str(state.rho0),
            "turns": state.turn, "phi": phi.to_json()}


def orbit_certificate(state, spec: LacunarySpec, phi: BiLipschitzMap,
                      interval: Tuple[Fraction, Fraction]) -> Certificate:
    """Claim of a lacunary run: the blocks cleared so far, at constant c."""
    snap = _schedule_snapshot(state, phi)
    snap["spec"] = spec.to_json()
    return Certificate(ORBIT_SEPARATION, interval, state.c,
                       state.blocks_cleared, "blocks", snap)


def ba_certificate(state, phi: BiLipschitzMap,
                   interval: Tuple[Fraction, Fraction]) -> Certificate:
    """Claim of a badly-approximable run: denominator blocks done so far."""
    return Certificate(BAD_APPROX, interval, state.c, state.blocks_done,
                       "blocks", _schedule_snapshot(state, phi))


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class VerificationResult:
    passed: bool
    checked: int
    reason: str
    witness: Optional[dict] = None

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self) -> dict:
        return {"passed": self.passed, "checked": self.checked,
                "reason": self.reason, "witness": self.witness}


def _snap_frac(snap: dict, key: str) -> Fraction:
    return parse_rational(snap[key])


def _rederive_orbit(snap: dict):
    """Recompute the lacunary schedule constants from the snapshot inputs.

    Mirrors the planner arithmetic on purpose without calling it: the
    verifier must reject a state whose stored constant was corrupted, so
    it trusts only the recorded inputs.
    """
    spec = LacunarySpec.from_json(snap["spec"])
    phi = BiLipschitzMap.from_json(snap["phi"])
    alpha, beta = _snap_frac(snap, "alpha"), _snap_frac(snap, "beta")
    rho0, rho = _snap_frac(snap, "rho0"), _snap_frac(snap, "rho_prime")
    ab = alpha * beta
    if not 0 < ab < 1:
        raise SpecError("snapshot ratios leave (0, 1)")
    inv = 1 / ab
    M, L = spec.M, phi.lipschitz
    N = 1
    while inv ** N.bit_length() > M ** N:
        N += 1
        if N > 10 ** 6:
            raise SpecError("no block capacity below 10^6; M too close to 1")
    r = N.bit_length()
    bound = inv ** (r - 1) / L
    k0 = 1
    while not (rho < rho0 and 2 * rho * (1 + ab ** (r + 1)) < bound):
        k0 += 1
        rho *= ab
    c = (rho / L) * ab ** (3 * r)
    return spec, phi, ab, r, k0, c


def _rederive_ba(snap: dict):
    phi = BiLipschitzMap.from_json(snap["phi"])
    alpha, beta = _snap_frac(snap, "alpha"), _snap_frac(snap, "beta")
    rho0 = _snap_frac(snap, "rho0")
    ab = alpha * beta
    if not 0 < ab < 1:
        raise SpecError("snapshot ratios leave (0, 1)")
    L = phi.lipschitz
    bound = ab ** 2 / (2 * L * (1 + alpha))
    k0 = 2
    rho = ab * _snap_frac(snap, "rho_prime")
    while not (rho < bound and rho < rho0):
        k0 += 1
        rho *= ab
    c = rho / (beta * L)
    return phi, ab, k0, c


def _constant_mismatch(expected: Fraction, got: Fraction) -> VerificationResult:
    return VerificationResult(
        False, 0,
        "constant mismatch: the snapshot schedule gives c = %s" % expected,
        witness={"field": "c", "expected": str(expected), "got": str(got)})


def _orbit_witness(phi: BiLipschitzMap, u: Fraction, v: Fraction,
                   t: Fraction, y: Fraction, n: int) -> dict:
    """The interval point whose n-th orbit term lands nearest the target."""
    m_lo = math.ceil(t * u - y)
    m_hi = math.floor(t * v - y)
    if m_lo <= m_hi:
        xin, dist = (y + m_lo) / t, Fraction(0)
    else:
        du, dv = circle_dist(t * u, y), circle_dist(t * v, y)
        xin, dist = (u, du) if du <= dv else (v, dv)
    return {"n": n, "term": str(t), "target": str(y),
            "point": str(phi.apply(xin)), "distance": str(dist)}


def verify_orbit_separation(cert: Certificate) -> VerificationResult:
    """Exhaustively re-check an orbit-separation claim.

    Every term the horizon covers is checked with exact circle arithmetic
    over the whole interval at once.  Raises HorizonMismatch when the
    claimed blocks need more turns than the snapshot records.
    """
    if cert.kind != ORBIT_SEPARATION:
        raise SpecError("not an orbit-separation certificate")
    lo, hi = cert.interval
    snap = cert.snapshot
    if "alpha" in snap:
        spec, phi, ab, r, k0, c = _rederive_orbit(snap)
        if c != cert.c:
            return _constant_mismatch(c, cert.c)
        if cert.horizon_kind != "blocks":
            raise SpecError("schedule snapshots certify whole blocks")
        turns = int(snap["turns"])
        reachable = (turns - k0 + 2) // r - 2
        if cert.horizon > max(0, reachable):
            raise HorizonMismatch(
                "certificate claims %d blocks but %d turns finish at most %d"
                % (cert.horizon, turns, max(0, reachable)))
        top = (1 / ab) ** (r * cert.horizon)

        def covered(n, t):
            return t < top
    else:
        spec = LacunarySpec.from_json(snap["spec"])
        phi = BiLipschitzMap.from_json(snap["phi"]) if "phi" in snap \
            else BiLipschitzMap.identity()
        if cert.horizon_kind != "terms":
            raise SpecError("bare orbit certificates cover explicit terms")

        def covered(n, t):
            return n <= cert.horizon
    u, v = phi.preimage_interval(lo, hi)
    checked = 0
    for n, t in spec.terms.enumerate():
        if not isinstance(t, Fraction):
            raise SpecError("verification requires rational terms")
        if not covered(n, t):
            break
        y = spec.targets.target(n)
        dmin, _ = circle_dist_range(t * u, t * v, y)
        checked += 1
        if dmin < cert.c:
            return VerificationResult(
                False, checked, "separation fails at term %d" % n,
                witness=_orbit_witness(phi, u, v, t, y, n))
    return VerificationResult(
        True, checked,
        "all %d covered terms stay %s-separated" % (checked, cert.c))


def verify_ba(cert: Certificate, max_q: int = DEFAULT_MAX_Q) -> VerificationResult:
    """Exhaustively re-check a badly-approximable claim up to denominator Q.

    Q is floor(R^h) for h finished blocks, capped at max_q.  The walk
    enumerates every reduced fraction within c of the preimage interval;
    a violation is any p/q at q^2-weighted distance <= c from the hull.
    """
    if cert.kind != BAD_APPROX:
        raise SpecError("not a badly-approximable certificate")
    lo, hi = cert.interval
    snap = cert.snapshot
    if "alpha" in snap:
        phi, ab, k0, c = _rederive_ba(snap)
        if c != cert.c:
            return _constant_mismatch(c, cert.c)
        if cert.horizon_kind != "blocks":
            raise SpecError("schedule snapshots certify whole blocks")
        turns = int(snap["turns"])
        if cert.horizon > max(0, turns - k0 + 2):
            raise HorizonMismatch(
                "certificate claims %d blocks but %d turns finish at most %d"
                % (cert.horizon, turns, max(0, turns - k0 + 2)))
        q_cap = min(floor_sqrt((1 / ab) ** cert.horizon), max_q)
    else:
        phi = BiLipschitzMap.from_json(snap["phi"]) if "phi" in snap \
            else BiLipschitzMap.identity()
        if cert.horizon_kind != "denominators":
            raise SpecError("bare certificates bound the denominator directly")
        q_cap = min(cert.horizon, max_q)
    u, v = phi.preimage_interval(lo, hi)
    checked = 0
    for f in fractions_in_interval(u - cert.c, v + cert.c, q_cap):
        d = max(Fraction(0), u - f, f - v)
        checked += 1
        if d * f.denominator ** 2 <= cert.c:
            return VerificationResult(
                False, checked,
                "rational %s sits within c/q^2 of the interval" % f,
                witness={"fraction": str(f), "distance": str(d),
                         "allowance": str(cert.c / f.denominator ** 2),
                         "point": str(phi.apply(min(max(f, u), v)))})
    return VerificationResult(
        True, checked,
        "no rational with denominator <= %d comes within c/q^2" % q_cap)


def verify(cert: Certificate, max_q: int = DEFAULT_MAX_Q) -> VerificationResult:
    if cert.kind == ORBIT_SEPARATION:
        return verify_orbit_separation(cert)
    return verify_ba(cert, max_q)


# ---------------------------------------------------------------------------
# dimension reporting


@dataclass(frozen=True)
class DimensionReport:
    """Analytic lower bound for the support dimension next to empirical
    pointwise estimates; margin is how far the worst estimate falls short."""

    analytic_bound: Exponent
    estimates: Tuple
    margin: object  # Fraction when both sides are rational, else float
    used: int

    @property
    def consistent(self) -> bool:
        return self.margin == 0

    def to_json(self) -> dict:
        ests = []
        for e in self.estimates:
            if isinstance(e, DimensionEstimate):
                ests.append({"rho": str(e.rho),
                             "value": None if e.value is None
                             else exponent_to_json(e.value)})
            else:
                ests.append({"rho": None, "value": exponent_to_json(e)})
        margin = self.margin
        if isinstance(margin, Fraction):
            margin = str(margin)
        return {"analytic_bound": exponent_to_json(self.analytic_bound),
                "estimates": ests, "margin": margin, "used": self.used,
                "consistent": self.consistent}


def _estimate_value(e) -> Optional[Exponent]:
    if isinstance(e, DimensionEstimate):
        return e.value
    return e


def dimension_report(decay: Optional[DecayParams] = None,
                     power_law: Optional[Exponent] = None,
                     estimates: Sequence = (),
                     audit: Optional[MeasureAuditReport] = None) -> DimensionReport:
    """Combine the analytic bound dim >= gamma with sampled estimates.

    The bound comes from a power-law exponent when one is known, else from
    absolute-decay constants (possibly pulled out of an audit report).
    Inconclusive estimates (interval mass bounds that straddle a gap
    boundary) are skipped.
    """
    if audit is not None:
        if power_law is None and audit.power_law is not None:
            power_law = audit.power_law[2]
        if decay is None:
            decay = audit.decay
    if power_law is not None:
        bound = power_law
    elif decay is not None:
        bound = decay.gamma
    else:
        raise SpecError("no decay or power-law constants to bound dimension")
    vals = [v for v in (_estimate_value(e) for e in estimates) if v is not None]
    if not vals:
        return DimensionReport(bound, tuple(estimates), None, 0)
    worst = vals[0]
    for v in vals[1:]:
        if exponent_cmp(v, worst) is Ordering.LESS:
            worst = v
    if exponent_cmp(worst, bound) is not Ordering.LESS:
        margin = Fraction(0)
    elif isinstance(worst, Fraction) and isinstance(bound, Fraction):
        margin = bound - worst
    else:
        margin = float(bound) - float(worst)
    return DimensionReport(bound, tuple(estimates), margin, len(vals))
