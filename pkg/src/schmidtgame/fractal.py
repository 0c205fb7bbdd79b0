"""IFS attractors on the line, self-similar measures, and decay audits.

The support K is the attractor of finitely many contracting similarities
w_i(x) = r_i x + a_i satisfying the open set condition on a declared hull;
the measure splits mass across cylinders by fixed positive weights.  Every
mass query returns exact two-sided rational bounds obtained by classifying
cylinders against the query interval, so audit verdicts are never floats.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .errors import SpecError
from .numerics import (Exponent, LogRatio, Ordering, format_rational,
                       make_exponent, invert_exponent, parse_rational,
                       pow_exact, rational_power_of, scaled_pow_cmp)

Interval = Tuple[Fraction, Fraction]

_ZERO2 = (Fraction(0), Fraction(0))


@dataclass(frozen=True)
class SimilarityMap:
    """w(x) = r x + a with 0 < |r| < 1."""

    r: Fraction
    a: Fraction

    def __post_init__(self):
        object.__setattr__(self, "r", Fraction(self.r))
        object.__setattr__(self, "a", Fraction(self.a))
        if not 0 < abs(self.r) < 1:
            raise SpecError(f"similarity ratio {self.r} is not a contraction")

    def apply(self, x):
        return self.r * Fraction(x) + self.a

    def apply_interval(self, lo, hi) -> Interval:
        p, q = self.apply(lo), self.apply(hi)
        return (p, q) if p <= q else (q, p)

    @property
    def fixed_point(self) -> Fraction:
        return self.a / (1 - self.r)


class IFS:
    """Finite system of contracting similarities with cylinder weights."""

    def __init__(self, maps: Sequence[SimilarityMap], weights: Sequence):
        maps = list(maps)
        weights = [Fraction(w) for w in weights]
        if len(maps) < 2:
            raise SpecError("an IFS needs at least two maps")
        if len(weights) != len(maps):
            raise SpecError("one weight per map required")
        if any(w <= 0 for w in weights) or sum(weights) != 1:
            raise SpecError("weights must be positive and sum to 1")
        if len({m.fixed_point for m in maps}) == 1:
            raise SpecError("maps share a fixed point; attractor degenerates")
        self.maps = maps
        self.weights = weights

    def check_open_set_condition(self, hull: Interval):
        """Spot-check: images of the open hull are pairwise disjoint."""
        images = sorted(m.apply_interval(*hull) for m in self.maps)
        for (alo, ahi), (blo, bhi) in zip(images, images[1:]):
            if ahi > blo:  # touching endpoints are fine, overlap is not
                raise SpecError(
                    f"open set condition fails: images [{alo},{ahi}] and [{blo},{bhi}] overlap")

    @staticmethod
    def from_json(doc: dict) -> "IFS":
        try:
            maps = [SimilarityMap(parse_rational(m["r"]), parse_rational(m["a"]))
                    for m in doc["maps"]]
            weights = [parse_rational(w) for w in doc["weights"]]
        except (KeyError, TypeError) as exc:
            raise SpecError(f"malformed IFS document: {exc}") from exc
        return IFS(maps, weights)

    def to_json(self) -> dict:
        return {
            "maps": [{"r": format_rational(m.r), "a": format_rational(m.a)}
                     for m in self.maps],
            "weights": [format_rational(w) for w in self.weights],
        }


@dataclass(frozen=True)
class Cylinder:
    word: Tuple[int, ...]
    lo: Fraction
    hi: Fraction
    mass: Fraction

    @property
    def interval(self) -> Interval:
        return (self.lo, self.hi)


class FractalSupport:
    """Attractor K of an IFS, with exact constructive point membership.

    Every point this class hands out is w_word(p0) for the canonical point
    p0 = fixed point of map 0, which is a containment proof by itself.
    """

    def __init__(self, ifs: IFS, hull: Interval):
        lo, hi = Fraction(hull[0]), Fraction(hull[1])
        if lo >= hi:
            raise SpecError("hull must be a nondegenerate closed interval")
        for m in ifs.maps:
            ilo, ihi = m.apply_interval(lo, hi)
            if ilo < lo or ihi > hi:
                raise SpecError("hull is not forward-invariant under the IFS")
        ifs.check_open_set_condition((lo, hi))
        self.ifs = ifs
        self.hull = (lo, hi)
        self.canonical_point = ifs.maps[0].fixed_point
        self.contraction = max(abs(m.r) for m in ifs.maps)

    @property
    def diameter(self) -> Fraction:
        return self.hull[1] - self.hull[0]

    def _compose(self, word: Iterable[int]) -> Tuple[Fraction, Fraction]:
        # returns (r, a) of w_word as a single affine map
        r, a = Fraction(1), Fraction(0)
        for i in word:
            m = self.ifs.maps[i]
            r, a = r * m.r, r * m.a + a
        return r, a

    def point(self, word: Iterable[int]) -> Fraction:
        r, a = self._compose(word)
        return r * self.canonical_point + a

    def verify_point(self, x, word: Iterable[int]) -> bool:
        return Fraction(x) == self.point(word)

    def cylinder(self, word: Sequence[int]) -> Cylinder:
        r, a = self._compose(word)
        lo, hi = self.hull
        p, q = r * lo + a, r * hi + a
        mass = Fraction(1)
        for i in word:
            mass *= self.ifs.weights[i]
        return Cylinder(tuple(word), min(p, q), max(p, q), mass)

    def cylinders(self, depth: int) -> List[Cylinder]:
        return [self.cylinder(w)
                for w in itertools.product(range(len(self.ifs.maps)), repeat=depth)]

    def cylinders_meeting(self, lo, hi, depth: int) -> List[Cylinder]:
        """Depth-`depth` cylinders whose closed interval meets [lo, hi]."""
        lo, hi = Fraction(lo), Fraction(hi)
        out: List[Cylinder] = []

        def rec(word, r, a, d):
            p, q = r * self.hull[0] + a, r * self.hull[1] + a
            clo, chi = (p, q) if p <= q else (q, p)
            if chi < lo or clo > hi:
                return
            if d == depth:
                mass = Fraction(1)
                for i in word:
                    mass *= self.ifs.weights[i]
                out.append(Cylinder(tuple(word), clo, chi, mass))
                return
            for i, m in enumerate(self.ifs.maps):
                rec(word + (i,), r * m.r, r * m.a + a, d + 1)

        rec((), Fraction(1), Fraction(0), 0)
        return out

    def locate(self, x, max_depth: int = 512) -> Optional[Tuple[int, ...]]:
        """Find a word proving x in K (x must be a canonical cylinder point)."""
        x = Fraction(x)

        def rec(word, r, a, d):
            p, q = r * self.hull[0] + a, r * self.hull[1] + a
            if not (min(p, q) <= x <= max(p, q)):
                return None
            if x == r * self.canonical_point + a:
                return word
            if d == max_depth:
                return None
            for i, m in enumerate(self.ifs.maps):
                got = rec(word + (i,), r * m.r, r * m.a + a, d + 1)
                if got is not None:
                    return got
            return None

        return rec((), Fraction(1), Fraction(0), 0)


class FractalMeasure:
    """Self-similar measure of the support's IFS weights."""

    def __init__(self, support: FractalSupport):
        self.support = support

    def interval_mass(self, lo, hi, depth: int) -> Tuple[Fraction, Fraction]:
        """Exact bounds (lower, upper) on mu([lo, hi]).

        A cylinder meeting the query in a single point contributes (0, 0):
        the measure is atomless because every weight is below 1, so the
        point-touch mass is exactly zero.  This is what lets equality-tight
        audits come out exact instead of inconclusive.
        """
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ValueError("empty interval")
        sup = self.support
        hlo, hhi = sup.hull
        maps, weights = sup.ifs.maps, sup.ifs.weights

        def rec(r, a, mass, d):
            p, q = r * hlo + a, r * hhi + a
            clo, chi = (p, q) if p <= q else (q, p)
            if chi < lo or clo > hi or chi == lo or clo == hi:
                return _ZERO2
            if lo <= clo and chi <= hi:
                return (mass, mass)
            if d == 0:
                return (Fraction(0), mass)
            lsum, usum = Fraction(0), Fraction(0)
            for m, w in zip(maps, weights):
                l, u = rec(r * m.r, r * m.a + a, mass * w, d - 1)
                lsum += l
                usum += u
            return (lsum, usum)

        return rec(Fraction(1), Fraction(0), Fraction(1), depth)

    def ball_mass(self, center, radius, depth: int) -> Tuple[Fraction, Fraction]:
        center, radius = Fraction(center), Fraction(radius)
        if radius <= 0:
            raise ValueError("radius must be positive")
        return self.interval_mass(center - radius, center + radius, depth)


# ---------------------------------------------------------------------------
# constructive gap search


def _merge_closed(intervals: Iterable[Interval]) -> List[Interval]:
    ivs = sorted((min(a, b), max(a, b)) for a, b in intervals)
    out: List[Interval] = []
    for lo, hi in ivs:
        if out and lo <= out[-1][1]:  # overlap or touch: closed union stays closed
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def find_point_in_gap(support: FractalSupport, inside: Interval,
                      forbidden: Sequence[Interval],
                      max_depth: Optional[int] = None,
                      ) -> Optional[Tuple[Fraction, Tuple[int, ...]]]:
    """A point of K inside `inside` and outside every closed forbidden
    interval, as (point, word), or None.

    None is returned only after descending to cylinders smaller than a
    quarter of the narrowest uncovered gap, which exhausts the canonical
    candidates; it is a search failure, not an emptiness proof.
    """
    ilo, ihi = Fraction(inside[0]), Fraction(inside[1])
    if ilo > ihi:
        raise ValueError("empty inside interval")
    merged = _merge_closed(forbidden)

    def covered(x) -> bool:
        return any(flo <= x <= fhi for flo, fhi in merged)

    if ilo == ihi:
        if covered(ilo):
            return None
        word = support.locate(ilo)
        return (ilo, word) if word is not None else None

    # narrowest positive gap left uncovered inside [ilo, ihi]
    gap = None
    cursor = ilo
    for flo, fhi in merged:
        if fhi < ilo:
            continue
        if flo > ihi:
            break
        if flo > cursor:
            piece = flo - cursor
            gap = piece if gap is None else min(gap, piece)
        cursor = max(cursor, fhi)
    if cursor < ihi:
        piece = ihi - cursor
        gap = piece if gap is None else min(gap, piece)
    if gap is None:
        return None  # forbidden covers every point of inside

    if max_depth is None:
        depth, diam = 0, support.diameter
        while diam * 4 >= gap:
            depth += 1
            diam *= support.contraction
        max_depth = depth

    hlo, hhi = support.hull
    maps = support.ifs.maps
    p0 = support.canonical_point

    # explicit DFS stack: max_depth can exceed the interpreter's frame limit
    stack = [((), Fraction(1), Fraction(0), 0)]
    while stack:
        word, r, a, d = stack.pop()
        p, q = r * hlo + a, r * hhi + a
        clo, chi = (p, q) if p <= q else (q, p)
        if chi < ilo or clo > ihi:
            continue
        if any(flo <= clo and chi <= fhi for flo, fhi in merged):
            continue
        x = r * p0 + a
        if ilo <= x <= ihi and not covered(x):
            return (x, word)
        if d == max_depth:
            continue
        for i in range(len(maps) - 1, -1, -1):
            m = maps[i]
            stack.append((word + (i,), r * m.r, r * m.a + a, d + 1))
    return None


# ---------------------------------------------------------------------------
# decay parameters and conversions


def _exponent_is_positive(e: Exponent) -> bool:
    if isinstance(e, LogRatio):
        return e.sign() > 0
    return Fraction(e) > 0


@dataclass(frozen=True)
class DecayParams:
    """Constants (C, gamma, rho0) of absolute decay:
    mu(B(x,rho) ∩ B(y, eps*rho)) < C eps^gamma mu(B(x,rho)) for rho <= rho0."""

    C: Fraction
    gamma: Exponent
    rho0: Fraction

    def __post_init__(self):
        object.__setattr__(self, "C", Fraction(self.C))
        object.__setattr__(self, "rho0", Fraction(self.rho0))
        if self.C <= 0 or self.rho0 <= 0 or not _exponent_is_positive(self.gamma):
            raise SpecError("decay constants must be positive")


def federer_to_exponent(eps0, delta) -> Tuple[Fraction, Exponent]:
    """Doubling lower bound delta at scale factor eps0, in exponent form
    (c, gamma) with c = delta and gamma = log delta / log eps0."""
    eps0, delta = Fraction(eps0), Fraction(delta)
    if not (0 < eps0 < 1 and 0 < delta < 1):
        raise SpecError("conversion requires 0 < eps0, delta < 1")
    return delta, make_exponent(delta, eps0)


def efd_to_exponent(eps0, delta) -> Tuple[Fraction, Exponent]:
    """Upper-bound counterpart: c = 1/delta, same gamma."""
    eps0, delta = Fraction(eps0), Fraction(delta)
    if not (0 < eps0 < 1 and 0 < delta < 1):
        raise SpecError("conversion requires 0 < eps0, delta < 1")
    return 1 / delta, make_exponent(delta, eps0)


def _rational_pow(base: Fraction, e: Exponent) -> Optional[Fraction]:
    """base**e as an exact rational, or None when irrational/undetected."""
    base = Fraction(base)
    if isinstance(e, LogRatio):
        k = rational_power_of(base, e.base)
        if k is None:
            return None
        return pow_exact(e.top, k)
    return pow_exact(base, Fraction(e))


def decay_from_federer_efd(c1, gamma1: Exponent, c2, gamma2: Exponent,
                           rho0) -> DecayParams:
    """Combine exponent-form doubling bounds into absolute-decay constants:
    C = c2 * c1^-1 * 3^gamma1, gamma = gamma2, rho0' = rho0 / 3."""
    c1, c2, rho0 = Fraction(c1), Fraction(c2), Fraction(rho0)
    three = _rational_pow(Fraction(3), gamma1)
    if three is None:
        raise SpecError(
            "3**gamma1 is not rational for these constants; C would be irrational")
    return DecayParams(C=c2 / c1 * three, gamma=gamma2, rho0=rho0 / 3)


def check_alpha(alpha, decay: DecayParams) -> bool:
    """Admissibility of Alice's ratio: (4 alpha)^gamma <= 1/(3C)."""
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        return False
    got = scaled_pow_cmp(Fraction(1) / (3 * decay.C), Fraction(1),
                         4 * alpha, decay.gamma)
    return got in (Ordering.GREATER, Ordering.EQUAL)


def max_alpha(decay: DecayParams, bits: int = 12) -> Fraction:
    """Largest admissible dyadic alpha with denominator 2**bits.

    The true threshold (1/4)(1/(3C))^(1/gamma) is usually irrational;
    a dyadic lower approximation keeps every downstream constant rational.
    """
    scale = 1 << bits
    lo_num, hi_num = 0, scale - 1
    while lo_num < hi_num:  # binary search on check_alpha, monotone in alpha
        mid = (lo_num + hi_num + 1) // 2
        if check_alpha(Fraction(mid, scale), decay):
            lo_num = mid
        else:
            hi_num = mid - 1
    if lo_num == 0:
        raise SpecError(f"no admissible alpha at denominator 2**{bits}; increase bits")
    return Fraction(lo_num, scale)


# ---------------------------------------------------------------------------
# audits


class Verdict(Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass
class AuditRow:
    check: str
    point: dict
    verdict: Verdict
    detail: str = ""


@dataclass
class AuditOutcome:
    check: str
    params: dict
    verdict: Verdict
    witness: Optional[AuditRow] = None
    rows: List[AuditRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS


@dataclass
class AuditGrid:
    """Finite sampling grid for the decay audits.

    xs: support points (canonical cylinder points, hence exactly in K);
    rhos: radii, aligned to contraction powers so exponent comparisons
    collapse to integer-power arithmetic; eps: scale factors, aligned to
    gamma's base for the same reason; offsets: y = x + offset * rho.
    Pairs (x, rho) with B(x, rho) not inside the hull are skipped: at the
    hull's edge one-sided balls create boundary equalities that the strict
    decay inequality genuinely fails, and the game only ever needs decay
    at interior scales.
    """

    xs: List[Fraction]
    rhos: List[Fraction]
    eps: List[Fraction]
    offsets: List[Fraction]
    depths: Tuple[int, ...] = (6, 9, 12)
    interior_only: bool = True

    @staticmethod
    def default(support: FractalSupport, rho0, *, x_depth: int = 3,
                rho_count: int = 5, eps_count: int = 3,
                eps_base: Optional[Fraction] = None,
                depths: Tuple[int, ...] = (6, 9, 12)) -> "AuditGrid":
        rho0 = Fraction(rho0)
        words = itertools.product(range(len(support.ifs.maps)), repeat=x_depth)
        xs = sorted({support.point(w) for w in words} | {support.canonical_point})
        rhos = []
        rho = support.diameter
        while len(rhos) < rho_count:
            rho *= support.contraction
            if rho <= rho0:
                rhos.append(rho)
        base = Fraction(eps_base) if eps_base is not None else support.contraction
        eps = [base ** j for j in range(1, eps_count + 1)]
        offsets = [Fraction(0), Fraction(1, 2), Fraction(-1, 2), Fraction(1), Fraction(-1)]
        return AuditGrid(xs=xs, rhos=rhos, eps=eps, offsets=offsets, depths=depths)

    def pairs(self, support: FractalSupport):
        hlo, hhi = support.hull
        for x in self.xs:
            for rho in self.rhos:
                if self.interior_only and not (hlo <= x - rho and x + rho <= hhi):
                    continue
                yield x, rho


def _grid_point(**kw) -> dict:
    return kw


def check_absolute_decay(measure: FractalMeasure, params: DecayParams,
                         grid: AuditGrid) -> AuditOutcome:
    """Grid audit of mu(B(x,rho) ∩ B(y,eps rho)) < C eps^gamma mu(B(x,rho))."""
    outcome = AuditOutcome(check="absolute_decay",
                           params={"C": params.C, "gamma": params.gamma,
                                   "rho0": params.rho0},
                           verdict=Verdict.PASS)
    C, gamma = params.C, params.gamma
    for x, rho in grid.pairs(measure.support):
        if rho > params.rho0:
            continue
        for eps in grid.eps:
            for off in grid.offsets:
                y = x + off * rho
                ilo = max(x - rho, y - eps * rho)
                ihi = min(x + rho, y + eps * rho)
                verdict, detail = Verdict.INCONCLUSIVE, "mass bounds too coarse"
                for depth in grid.depths:
                    blo, bhi = measure.ball_mass(x, rho, depth)
                    if ilo > ihi:
                        clo, chi = Fraction(0), Fraction(0)
                    else:
                        clo, chi = measure.interval_mass(ilo, ihi, depth)
                    if blo > 0 and scaled_pow_cmp(chi, C * blo, eps, gamma) is Ordering.LESS:
                        verdict, detail = Verdict.PASS, ""
                        break
                    if scaled_pow_cmp(clo, C * bhi, eps, gamma) is not Ordering.LESS:
                        verdict = Verdict.FAIL
                        detail = (f"mu(B∩B') >= {clo} but C eps^gamma mu(B) <= "
                                  f"{C * bhi} * {eps}^gamma")
                        break
                row = AuditRow("absolute_decay",
                               _grid_point(x=x, rho=rho, y=y, eps=eps),
                               verdict, detail)
                outcome.rows.append(row)
                if verdict is not Verdict.PASS:
                    outcome.verdict = verdict
                    outcome.witness = row
                    return outcome
    return outcome


def _ratio_check(measure, eps0, delta, grid, lower: bool, name: str) -> AuditOutcome:
    eps0, delta = Fraction(eps0), Fraction(delta)
    outcome = AuditOutcome(check=name, params={"eps0": eps0, "delta": delta},
                           verdict=Verdict.PASS)
    for x, rho in grid.pairs(measure.support):
        verdict, detail = Verdict.INCONCLUSIVE, "mass bounds too coarse"
        for depth in grid.depths:
            slo, shi = measure.ball_mass(x, eps0 * rho, depth)
            blo, bhi = measure.ball_mass(x, rho, depth)
            if lower:  # mu(B(x, eps0 rho)) >= delta mu(B(x, rho))
                if slo >= delta * bhi:
                    verdict, detail = Verdict.PASS, ""
                    break
                if shi < delta * blo:
                    verdict, detail = Verdict.FAIL, f"ratio <= {shi}/{blo}"
                    break
            else:      # mu(B(x, eps0 rho)) <= delta mu(B(x, rho))
                if shi <= delta * blo:
                    verdict, detail = Verdict.PASS, ""
                    break
                if slo > delta * bhi:
                    verdict, detail = Verdict.FAIL, f"ratio >= {slo}/{bhi}"
                    break
        row = AuditRow(name, _grid_point(x=x, rho=rho), verdict, detail)
        outcome.rows.append(row)
        if verdict is not Verdict.PASS:
            outcome.verdict = verdict
            outcome.witness = row
            return outcome
    return outcome


def check_federer(measure: FractalMeasure, eps0, delta, grid: AuditGrid) -> AuditOutcome:
    return _ratio_check(measure, eps0, delta, grid, lower=True, name="federer")


def check_efd(measure: FractalMeasure, eps0, delta, grid: AuditGrid) -> AuditOutcome:
    return _ratio_check(measure, eps0, delta, grid, lower=False, name="efd")


def check_power_law(measure: FractalMeasure, k1, k2, gamma: Exponent,
                    grid: AuditGrid) -> AuditOutcome:
    """Grid audit of k1 rho^gamma <= mu(B(x, rho)) <= k2 rho^gamma."""
    k1, k2 = Fraction(k1), Fraction(k2)
    outcome = AuditOutcome(check="power_law",
                           params={"k1": k1, "k2": k2, "gamma": gamma},
                           verdict=Verdict.PASS)
    for x, rho in grid.pairs(measure.support):
        verdict, detail = Verdict.INCONCLUSIVE, "mass bounds too coarse"
        for depth in grid.depths:
            blo, bhi = measure.ball_mass(x, rho, depth)
            low_ok = scaled_pow_cmp(blo, k1, rho, gamma) in (Ordering.GREATER, Ordering.EQUAL)
            high_ok = scaled_pow_cmp(bhi, k2, rho, gamma) in (Ordering.LESS, Ordering.EQUAL)
            if low_ok and high_ok:
                verdict, detail = Verdict.PASS, ""
                break
            low_bad = scaled_pow_cmp(bhi, k1, rho, gamma) is Ordering.LESS
            high_bad = scaled_pow_cmp(blo, k2, rho, gamma) is Ordering.GREATER
            if low_bad or high_bad:
                side = "below k1 rho^gamma" if low_bad else "above k2 rho^gamma"
                verdict, detail = Verdict.FAIL, f"mass {side}"
                break
        row = AuditRow("power_law", _grid_point(x=x, rho=rho), verdict, detail)
        outcome.rows.append(row)
        if verdict is not Verdict.PASS:
            outcome.verdict = verdict
            outcome.witness = row
            return outcome
    return outcome


@dataclass
class MeasureAuditReport:
    outcomes: List[AuditOutcome] = field(default_factory=list)
    federer: Optional[Tuple[Fraction, Fraction]] = None
    efd: Optional[Tuple[Fraction, Fraction]] = None
    power_law: Optional[Tuple[Fraction, Fraction, Exponent]] = None
    decay: Optional[DecayParams] = None
    derived: dict = field(default_factory=dict)

    @property
    def witnesses(self) -> List[AuditRow]:
        return [o.witness for o in self.outcomes if o.witness is not None]

    @property
    def all_passed(self) -> bool:
        return all(o.passed for o in self.outcomes)

    def csv_rows(self) -> List[List[str]]:
        rows = [["check", "params", "grid_point", "verdict"]]
        for o in self.outcomes:
            params = " ".join(f"{k}={v}" for k, v in o.params.items())
            for r in o.rows:
                point = " ".join(f"{k}={v}" for k, v in r.point.items())
                rows.append([r.check, params, point, r.verdict.value])
        return rows


def audit_measure(measure: FractalMeasure, grid: AuditGrid, *,
                  federer: Optional[Tuple] = None,
                  efd: Optional[Tuple] = None,
                  decay: Optional[DecayParams] = None,
                  power_law: Optional[Tuple] = None,
                  derive_decay_rho0=None) -> MeasureAuditReport:
    """Run the configured checks; optionally derive DecayParams from the
    doubling constants and audit the derived absolute decay as well."""
    report = MeasureAuditReport()
    c1 = gamma1 = c2 = gamma2 = None
    if federer is not None:
        eps0, delta = federer
        report.federer = (Fraction(eps0), Fraction(delta))
        report.outcomes.append(check_federer(measure, eps0, delta, grid))
        c1, gamma1 = federer_to_exponent(eps0, delta)
        report.derived["c1"], report.derived["gamma1"] = c1, gamma1
    if efd is not None:
        eps0, delta = efd
        report.efd = (Fraction(eps0), Fraction(delta))
        report.outcomes.append(check_efd(measure, eps0, delta, grid))
        c2, gamma2 = efd_to_exponent(eps0, delta)
        report.derived["c2"], report.derived["gamma2"] = c2, gamma2
    if decay is None and derive_decay_rho0 is not None:
        if c1 is None or c2 is None:
            raise SpecError("deriving decay needs both federer and efd constants")
        decay = decay_from_federer_efd(c1, gamma1, c2, gamma2, derive_decay_rho0)
        report.derived["C"] = decay.C
    if decay is not None:
        report.decay = decay
        report.outcomes.append(check_absolute_decay(measure, decay, grid))
    if power_law is not None:
        k1, k2, gamma = power_law
        report.power_law = (Fraction(k1), Fraction(k2), gamma)
        report.outcomes.append(check_power_law(measure, k1, k2, gamma, grid))
    return report


# ---------------------------------------------------------------------------
# pointwise dimension


@dataclass(frozen=True)
class DimensionEstimate:
    rho: Fraction
    mass_lower: Fraction
    mass_upper: Fraction
    value_lower: Optional[Exponent]  # from mass_upper
    value_upper: Optional[Exponent]  # from mass_lower; None when mass_lower = 0

    @property
    def exact(self) -> bool:
        return self.mass_lower == self.mass_upper and self.mass_lower > 0

    @property
    def value(self) -> Optional[Exponent]:
        return self.value_lower if self.exact else None


def lower_pointwise_dimension(measure: FractalMeasure, x, rhos: Sequence,
                              depth_cap: int = 48) -> List[DimensionEstimate]:
    """log mu(B(x,rho)) / log rho at each scheduled rho, as exact bounds."""
    x = Fraction(x)
    sup = measure.support
    if not sup.hull[0] <= x <= sup.hull[1]:
        raise ValueError("x outside the hull")
    out = []
    for rho in rhos:
        rho = Fraction(rho)
        if not 0 < rho < 1:
            raise ValueError("dimension scales need 0 < rho < 1")
        depth, diam = 0, sup.diameter
        while diam > rho and depth < depth_cap:
            depth += 1
            diam *= sup.contraction
        depth = min(depth + 2, depth_cap)
        mlo, mhi = measure.ball_mass(x, rho, depth)
        value_lower = make_exponent(mhi, rho) if 0 < mhi < 1 else (
            Fraction(0) if mhi >= 1 else None)
        value_upper = make_exponent(mlo, rho) if 0 < mlo < 1 else (
            Fraction(0) if mlo >= 1 else None)
        out.append(DimensionEstimate(rho, mlo, mhi, value_lower, value_upper))
    return out


# ---------------------------------------------------------------------------
# built-in systems


def cantor_support() -> FractalSupport:
    """Middle-third Cantor set on [0, 1]."""
    ifs = IFS([SimilarityMap(Fraction(1, 3), Fraction(0)),
               SimilarityMap(Fraction(1, 3), Fraction(2, 3))],
              [Fraction(1, 2), Fraction(1, 2)])
    return FractalSupport(ifs, (Fraction(0), Fraction(1)))


def cantor_measure() -> FractalMeasure:
    return FractalMeasure(cantor_support())


def binary_support() -> FractalSupport:
    """[0, 1] as the attractor of the two halving maps; its coin-flip
    measure is Lebesgue measure restricted to [0, 1]."""
    ifs = IFS([SimilarityMap(Fraction(1, 2), Fraction(0)),
               SimilarityMap(Fraction(1, 2), Fraction(1, 2))],
              [Fraction(1, 2), Fraction(1, 2)])
    return FractalSupport(ifs, (Fraction(0), Fraction(1)))


def lebesgue_measure() -> FractalMeasure:
    return FractalMeasure(binary_support())
