"""Certified polynomial decay bounds for the limit law's characteristic function.

The modulus of the fixed-point characteristic function phi admits a ladder of
bounds |phi(t)| <= c_p |t|^{-p} built from four elementary mechanisms:

  * `c_half`   - stationary-phase (van der Corput) estimate, p = 1/2, c = 2;
  * `c_interp` - geometric interpolation between p = 1/2 and p = 1,
                 c_p = 2^{2p} pi^{2p-1} (recovers c_1 = 4 pi);
  * `c_double` - squaring the functional equation doubles the exponent,
                 c_{2p} = Gamma(1-p)^2 / Gamma(2-2p) * c_p^2 for 0 < p < 1;
  * `c_step`   - for p > 1 the exponent climbs by whole steps,
                 c_{p+1} = 2^{p+1} c_p^{1+1/p} p/(p-1).

Chains of such bounds combine into a piecewise power-law envelope (pointwise
minimum).  A separate logarithmic refinement 32 pi^2 t^{-2} (ln(t/(4 pi)) + 2),
valid for t >= 1.72, undercuts the pure powers on a middle window of t and is
spliced in on request; the window endpoints are recomputed by bisection, not
hard-coded.

Constants are propagated unrounded: rounding up mid-chain would blow the
later rungs past their integer display ceilings (187, 103215, 197102280).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core_numerics import (
    DEFAULT_QUADRATURE,
    ENDPOINT_EPS,
    QuadratureSpec,
    gamma,
    h_values,
    integrate,
)

__all__ = [
    "DecayBound",
    "ChainEntry",
    "BoundChain",
    "PiecewiseEnvelope",
    "c_half",
    "c_interp",
    "c_double",
    "c_step",
    "c_universal",
    "log_bound",
    "LOG_BOUND",
    "LOG_BOUND_T_MIN",
    "build_chain",
    "display_ceiling",
    "crossing",
    "make_envelope",
    "vdc_cf",
    "derivative_cf_bound",
]

PURE_POWER = "pure_power"
POWER_LOG = "power_log"

# the logarithmic bound is certified from here on; below this point it dips
# under 1 nowhere, so nothing is lost
LOG_BOUND_T_MIN = 1.72
_LOG_C = 32.0 * math.pi**2
_FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class DecayBound:
    """One bound on |phi|: either c*t^-p or c*t^-2*(ln(t/4pi)+2)."""

    p: float
    c: float
    form: str = PURE_POWER
    valid_from: float = 0.0

    def __post_init__(self):
        if self.form not in (PURE_POWER, POWER_LOG):
            raise ValueError(f"unknown bound form {self.form!r}")
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise ValueError(f"bound constant must be positive and finite, got {self.c}")
        if self.p < 0.0:
            raise ValueError(f"decay exponent must be >= 0, got {self.p}")
        if self.form == POWER_LOG and self.valid_from < LOG_BOUND_T_MIN:
            raise ValueError(f"power_log bounds are only certified for t >= {LOG_BOUND_T_MIN}")

    def evaluate(self, t):
        t = np.asarray(t, dtype=np.float64)
        if np.any(t <= 0.0):
            raise ValueError("decay bounds are evaluated at t > 0")
        if self.form == PURE_POWER:
            return self.c * t ** (-self.p)
        return self.c * t ** (-2.0) * (np.log(t / _FOUR_PI) + 2.0)


@dataclass(frozen=True)
class ChainEntry:
    p: float
    c: float
    provenance: str


@dataclass(frozen=True)
class BoundChain:
    """A finite ladder of pure-power bounds with strictly increasing exponents."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(self.entries)
        if not entries:
            raise ValueError("a bound chain needs at least one entry")
        ps = [e.p for e in entries]
        if any(b <= a for a, b in zip(ps, ps[1:])):
            raise ValueError("chain exponents must be strictly increasing")
        for e in entries:
            if e.p == 0.0 and e.c != 1.0:
                raise ValueError("the p = 0 rung must carry c = 1 (a cf modulus is <= 1)")
        # consistency: c_p^(1/p) nondecreasing in p, else the weaker bound
        # would contradict the stronger one at large t
        roots = [(e.p, e.c ** (1.0 / e.p)) for e in entries if e.p > 0.0]
        for (p1, r1), (p2, r2) in zip(roots, roots[1:]):
            if r1 > r2 * (1.0 + 1e-12):
                raise ValueError(
                    f"inconsistent chain: c^(1/p) decreases from p={p1} to p={p2}"
                )
        object.__setattr__(self, "entries", entries)

    def constant_at(self, p: float) -> float:
        for e in self.entries:
            if abs(e.p - p) <= 1e-9:
                return e.c
        raise KeyError(f"chain has no rung at exponent p={p}; available: "
                       f"{[e.p for e in self.entries]}")

    def max_exponent(self) -> float:
        return self.entries[-1].p

    def bounds(self):
        return [DecayBound(e.p, e.c) for e in self.entries]

    def to_json(self):
        return [
            {
                "p": e.p,
                "c": e.c,
                "ceiling": display_ceiling(e),
                "provenance": e.provenance,
            }
            for e in self.entries
        ]


def c_half() -> DecayBound:
    """Van der Corput estimate: |phi(t)| <= 2 |t|^{-1/2}."""
    return DecayBound(0.5, 2.0)


def c_interp(p: float) -> DecayBound:
    """Geometric interpolation on 1/2 <= p <= 1: c_p = 2^{2p} pi^{2p-1}."""
    if not 0.5 <= p <= 1.0:
        raise ValueError(f"c_interp is only valid for 1/2 <= p <= 1, got {p}")
    return DecayBound(p, 2.0 ** (2.0 * p) * math.pi ** (2.0 * p - 1.0))


def c_double(p: float, cp: float) -> DecayBound:
    """Exponent doubling via the squared fixed-point equation (0 < p < 1)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"c_double needs 0 < p < 1 (beta integral), got {p}")
    const = gamma(1.0 - p) ** 2 / gamma(2.0 - 2.0 * p) * cp**2
    return DecayBound(2.0 * p, const)


def c_step(p: float, cp: float) -> DecayBound:
    """Exponent step p -> p + 1 for p > 1: c = 2^{p+1} cp^{1+1/p} p/(p-1)."""
    if not p > 1.0:
        raise ValueError(f"c_step needs p > 1, got {p}")
    const = 2.0 ** (p + 1.0) * cp ** (1.0 + 1.0 / p) * p / (p - 1.0)
    return DecayBound(p + 1.0, const)


def c_universal(p: float) -> DecayBound:
    """Closed-form catch-all c_p = 2^{p^2 + 6p}, valid for every p > 0.

    Grossly larger than the assembled chain everywhere the chain exists; its
    value is that it needs no assembly.
    """
    if not p > 0.0:
        raise ValueError(f"c_universal needs p > 0, got {p}")
    return DecayBound(p, 2.0 ** (p * p + 6.0 * p))


def log_bound(t: float) -> float:
    """Logarithmic refinement 32 pi^2 t^{-2} (ln(t/(4 pi)) + 2), t >= 1.72."""
    if t < LOG_BOUND_T_MIN:
        raise ValueError(f"log_bound is certified only for t >= {LOG_BOUND_T_MIN}")
    return _LOG_C / (t * t) * (math.log(t / _FOUR_PI) + 2.0)


LOG_BOUND = DecayBound(2.0, _LOG_C, POWER_LOG, LOG_BOUND_T_MIN)

# exponents reachable by the lemma chain: the four base rungs, then unit
# steps upward from 3/2
_BASE_RUNGS = (0.0, 0.5, 0.75, 1.0)


def _is_ladder_exponent(p: float) -> bool:
    if any(abs(p - b) <= 1e-12 for b in _BASE_RUNGS):
        return True
    if p >= 1.5 - 1e-12:
        k = round(p - 1.5)
        return abs(p - (1.5 + k)) <= 1e-12
    return False


def build_chain(targets) -> BoundChain:
    """Assemble the bound ladder covering every requested exponent.

    The chain always contains all reachable rungs up to the largest target:
    c_0 = 1, c_{1/2} = 2, c_{3/4} = sqrt(8 pi), c_1 = 4 pi, then
    c_{3/2} by doubling from 3/4 and unit steps beyond.
    """
    targets = sorted(set(float(p) for p in targets))
    if not targets:
        raise ValueError("build_chain needs at least one target exponent")
    for p in targets:
        if p < 0.0 or not _is_ladder_exponent(p):
            raise ValueError(
                f"no lemma chain reaches exponent p={p}; reachable exponents are "
                f"0, 1/2, 3/4, 1, and 3/2 + k for integer k >= 0"
            )
    p_max = targets[-1]
    entries = [ChainEntry(0.0, 1.0, "modulus_at_most_one")]
    if p_max >= 0.5:
        entries.append(ChainEntry(0.5, c_half().c, "van_der_corput"))
    if p_max >= 0.75:
        entries.append(ChainEntry(0.75, c_interp(0.75).c, "geometric_interpolation"))
    if p_max >= 1.0:
        entries.append(ChainEntry(1.0, c_interp(1.0).c, "geometric_interpolation"))
    if p_max >= 1.5:
        entries.append(ChainEntry(1.5, c_double(0.75, c_interp(0.75).c).c, "exponent_doubling"))
        p, c = 1.5, entries[-1].c
        while p + 1.0 <= p_max + 1e-12:
            nxt = c_step(p, c)
            p, c = nxt.p, nxt.c
            entries.append(ChainEntry(p, c, "unit_step"))
    return BoundChain(tuple(entries))


def display_ceiling(entry: ChainEntry):
    """Presentation constant: exact value for p <= 1, next integer above it
    for the assembled rungs (descriptions quote 187, 103215, 197102280)."""
    if entry.p <= 1.0:
        return entry.c
    return float(math.ceil(entry.c))


def crossing(b1: DecayBound, b2: DecayBound) -> float:
    """Where two pure power bounds exchange dominance: t = (c2/c1)^{1/(p2-p1)}."""
    if b1.form != PURE_POWER or b2.form != PURE_POWER:
        raise ValueError("crossing is defined for pure power bounds")
    if b2.p <= b1.p:
        raise ValueError("crossing expects exponents in increasing order")
    return (b2.c / b1.c) ** (1.0 / (b2.p - b1.p))


@dataclass(frozen=True)
class PiecewiseEnvelope:
    """Pointwise-minimum envelope: pieces (t_lo, t_hi, DecayBound) tiling (0, inf)."""

    pieces: tuple

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if not pieces:
            raise ValueError("an envelope needs at least one piece")
        if pieces[0][0] != 0.0 or not math.isinf(pieces[-1][1]):
            raise ValueError("envelope pieces must start at 0 and end at infinity")
        for (lo1, hi1, _), (lo2, hi2, _) in zip(pieces, pieces[1:]):
            if hi1 != lo2:
                raise ValueError("envelope pieces must tile without gaps or overlaps")
        for lo, hi, _ in pieces:
            if not lo < hi:
                raise ValueError("empty envelope piece")
        object.__setattr__(self, "pieces", pieces)

    def breakpoints(self) -> np.ndarray:
        return np.array([piece[0] for piece in self.pieces[1:]])

    def evaluate(self, t):
        t = np.asarray(t, dtype=np.float64)
        if np.any(t <= 0.0):
            raise ValueError("envelope is defined for t > 0")
        idx = np.searchsorted(self.breakpoints(), t, side="right")
        out = np.empty_like(t)
        for i, (_, _, bound) in enumerate(self.pieces):
            mask = idx == i
            if np.any(mask):
                out[mask] = bound.evaluate(t[mask])
        return out if out.ndim else float(out)

    def tail_exponent(self) -> float:
        return self.pieces[-1][2].p

    def to_json(self):
        return [
            {
                "t_lo": lo,
                "t_hi": ("inf" if math.isinf(hi) else hi),
                "p": b.p,
                "c": b.c,
                "form": b.form,
            }
            for lo, hi, b in self.pieces
        ]


def _plain_pieces(chain: BoundChain):
    bounds = chain.bounds()
    if bounds[0].p != 0.0:
        raise ValueError("envelope construction needs the p = 0 rung as its head")
    # lower-envelope sweep; a rung whose crossing with the next bound does not
    # move right never wins anywhere (e.g. p = 3/4 ties at 4 pi^2 on both
    # sides) and is dropped
    kept = [bounds[0]]
    cuts = []
    for b in bounds[1:]:
        t = crossing(kept[-1], b)
        while cuts and t <= cuts[-1]:
            kept.pop()
            cuts.pop()
            t = crossing(kept[-1], b)
        kept.append(b)
        cuts.append(t)
    edges = [0.0] + cuts + [math.inf]
    return [(edges[i], edges[i + 1], kept[i]) for i in range(len(kept))]


def _bisect_crossing(f, lo: float, hi: float) -> float:
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) == 0.0 or (hi - lo) <= 1e-12 * mid:
            return mid
        if (f(mid) > 0.0) == (flo > 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def make_envelope(chain: BoundChain, use_log: bool = False) -> PiecewiseEnvelope:
    """Build the pointwise-minimum envelope of a chain's bounds.

    With `use_log`, the logarithmic refinement replaces the power pieces on
    the (recomputed) window where it is smaller.  That requires a tail
    exponent above 2 for the envelope to come back out of the log piece.
    """
    pieces = _plain_pieces(chain)
    if not use_log:
        return PiecewiseEnvelope(tuple(pieces))
    if chain.max_exponent() <= 2.0:
        raise ValueError("the log refinement needs a chain rung with p > 2 "
                         "for the envelope tail to return to")

    def plain_eval(t: float) -> float:
        for lo, hi, b in pieces:
            if lo <= t < hi:
                return float(b.evaluate(t))
        return float(pieces[-1][2].evaluate(t))

    def diff(t: float) -> float:
        return log_bound(t) - plain_eval(t)

    # scan for the dominance window of the log bound on a log-spaced mesh
    t_hi_scan = 100.0 * pieces[-1][0] if math.isfinite(pieces[-1][0]) else 1e6
    ts = np.geomspace(LOG_BOUND_T_MIN, max(t_hi_scan, 1e4), 8192)
    signs = np.array([diff(float(t)) < 0.0 for t in ts])
    flips = np.nonzero(signs[1:] != signs[:-1])[0]
    if len(flips) == 0:
        return PiecewiseEnvelope(tuple(pieces))
    if len(flips) != 2 or signs[0] or signs[-1]:
        raise ValueError("unexpected log-bound dominance structure; "
                         "expected a single interior window")
    a = _bisect_crossing(diff, float(ts[flips[0]]), float(ts[flips[0] + 1]))
    b = _bisect_crossing(diff, float(ts[flips[1]]), float(ts[flips[1] + 1]))

    out = []
    for lo, hi, bound in pieces:
        if lo < min(hi, a):
            out.append((lo, min(hi, a), bound))
        if max(lo, b) < hi:
            out.append((max(lo, b), hi, bound))
    out.append((a, b, LOG_BOUND))
    out.sort(key=lambda piece: piece[0])
    return PiecewiseEnvelope(tuple(out))


def vdc_cf(y: float, z: float, t: float,
           spec: QuadratureSpec = DEFAULT_QUADRATURE) -> complex:
    """The oscillatory integral behind the van der Corput rung.

    Computes int_0^1 exp(i t h(y, z, u)) du by quadrature of the real and
    imaginary parts on [eps, 1-eps]; the trimmed slivers contribute at most
    2*eps in modulus.  The stationary-phase mechanism caps the modulus at
    2 t^{-1/2} for every real y, z.
    """
    if not t > 0.0:
        raise ValueError(f"vdc_cf needs t > 0, got {t}")
    lo, hi = ENDPOINT_EPS, 1.0 - ENDPOINT_EPS
    re = integrate(lambda u: np.cos(t * h_values(y, z, u)), lo, hi, spec)
    im = integrate(lambda u: np.sin(t * h_values(y, z, u)), lo, hi, spec)
    return complex(re, im)


def derivative_cf_bound(k: int, p: float, chain: BoundChain, abs_moments) -> float:
    """Constant c with |phi^(k)(t)| <= c t^{-p}.

    Each derivative halves the reachable decay exponent: the recursion
    c_{p,k} = 2 sqrt(c_{2p,k-1} * M_{k+1}) descends to the plain chain at
    exponent 2^k p, where M_j is an upper bound on E|Y|^j (`abs_moments[j]`).
    At p = 0 the bound is just M_k since |phi^(k)| <= E|Y|^k.
    """
    if k < 0 or int(k) != k:
        raise ValueError(f"derivative order must be a nonnegative integer, got {k}")
    if p < 0.0:
        raise ValueError(f"decay exponent must be >= 0, got {p}")
    if p == 0.0:
        if k >= len(abs_moments):
            raise ValueError(f"need abs_moments up to index {k}, have {len(abs_moments)}")
        return float(abs_moments[k])
    if k == 0:
        try:
            return chain.constant_at(p)
        except KeyError as exc:
            raise KeyError(
                f"derivative_cf_bound(k={k}, p={p}) bottoms out at chain exponent "
                f"{p}; build a deeper chain"
            ) from exc
    if k + 1 >= len(abs_moments):
        raise ValueError(
            f"derivative_cf_bound(k={k}) needs abs_moments up to index {k + 1}, "
            f"have {len(abs_moments)}"
        )
    inner = derivative_cf_bound(k - 1, 2.0 * p, chain, abs_moments)
    return 2.0 * math.sqrt(inner * float(abs_moments[k + 1]))
