"""Stability, fast-slow and fast-superfast transitions along the sleeping family.

Regimes along a path ``lam -> (lam, eta(lam))`` are read from the signs of
``F`` and, on the stable side, of ``E^2 - F`` and ``E``:

* ``F`` changing sign is the fast-slow (Hamiltonian-Hopf) transition;
* ``E^2 - F`` changing sign with ``F > 0`` is a fast-superfast event, an
  imaginary pair passing through a double zero;
* ``E`` changing sign is a collision of two pairs that does not change the
  qualitative picture (double pairs on the stable side, a real double pair on
  the unstable side).
"""

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .spectrum import (DEFAULT_TOL, SpectrumClass, eigenvalues_closed_form,
                       eigenvalues_numeric, invariant_scale, linearization,
                       multiset_distance, spectrum_report, transition_invariants)
from .symplectic_slice import hessian_coefficients

BISECT_TOL = 1e-12
CRITICAL_RTOL = 1e-12
# Inline closed-form vs numeric check in sweeps, relative to the spectral radius.
SWEEP_CHECK_RTOL = 1e-9
# At a Hamiltonian-Hopf collision the double eigenvalue is defective and
# rounding in L splits it by ~sqrt(machine eps) relative.
HOPF_BAND = 1e-6
HOPF_CHECK_RTOL = 1e-7


class InconsistentSpectrum(RuntimeError):
    pass


class InvalidRule(ValueError):
    pass


class Stability(enum.Enum):
    UNSTABLE = "Unstable"
    STABLE = "Stable"
    CRITICAL = "Critical"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class StabilityVerdict:
    kind: Stability
    witness: float = None


@dataclass(frozen=True)
class TransitionPoints:
    tau_fs: float
    tau_fsf_lewis: float = None


@dataclass(frozen=True)
class EtaRule:
    """How the isotropy coordinate is chosen along a sweep.

    ``kind`` is one of ``lewis`` (eta = lam/2), ``star`` (the maximizer of
    ``AC - B^2``), ``zero-e`` (``E = 0``; the same line as ``star``),
    ``linear`` (eta = a*lam + b) or ``const`` (eta = a).
    """

    kind: str
    a: float = 0.0
    b: float = 0.0

    KINDS = ("lewis", "star", "zero-e", "linear", "const")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise InvalidRule(f"unknown eta rule {self.kind!r}")
        if self.kind in ("lewis", "star", "zero-e") and (self.a or self.b):
            raise InvalidRule(f"rule {self.kind!r} takes no payload")

    def eta(self, p, lam):
        if self.kind == "lewis":
            return 0.5 * lam
        if self.kind == "star":
            return optimal_eta(p, lam)
        if self.kind == "zero-e":
            return (p.I3 - p.I1) * lam / (2.0 * p.I1)
        if self.kind == "linear":
            return self.a * lam + self.b
        return self.a

    @classmethod
    def parse(cls, text):
        kind, _, payload = text.strip().partition(":")
        kind = kind.lower()
        try:
            nums = [float(x) for x in payload.split(",")] if payload else []
        except ValueError:
            raise InvalidRule(f"bad eta rule payload in {text!r}") from None
        if kind == "linear":
            if len(nums) != 2:
                raise InvalidRule("linear rule needs 'linear:a,b'")
            return cls("linear", nums[0], nums[1])
        if kind == "const":
            if len(nums) != 1:
                raise InvalidRule("const rule needs 'const:c'")
            return cls("const", nums[0])
        if nums:
            raise InvalidRule(f"rule {kind!r} takes no payload")
        return cls(kind)

    def __str__(self):
        if self.kind == "linear":
            return f"linear:{self.a!r},{self.b!r}"
        if self.kind == "const":
            return f"const:{self.a!r}"
        return self.kind


def optimal_eta(p, lam):
    """The ``eta`` maximizing ``AC - B^2`` at fixed ``lam``."""
    return (p.I3 - p.I1) * lam / (2.0 * p.I1)


def definiteness_test(p, lam, eta):
    return hessian_coefficients(p, lam, eta).det2 > 0.0


def fast_slow_threshold(p):
    return 2.0 * math.sqrt(p.mgl * p.I1) / p.I3


def fast_superfast_lewis(p):
    """Spin rate where ``eta = lam/2`` meets ``E^2 = F``; ``None`` unless oblate."""
    if p.I3 <= p.I1:
        return None
    return math.sqrt(p.mgl / (p.I3 - p.I1))


def transition_points(p):
    return TransitionPoints(fast_slow_threshold(p), fast_superfast_lewis(p))


def stability_classify(p, lam):
    tau2 = fast_slow_threshold(p) ** 2
    lam2 = lam * lam
    if abs(lam2 - tau2) <= CRITICAL_RTOL * tau2:
        return StabilityVerdict(Stability.CRITICAL)
    if lam2 > tau2:
        return StabilityVerdict(Stability.STABLE, optimal_eta(p, lam))
    return StabilityVerdict(Stability.UNSTABLE)


def hyperbola_eta(p, lam):
    """Values of ``eta`` with ``E^2 = F`` at this ``lam`` (largest first)."""
    F = transition_invariants(p, lam, 0.0).F
    centre = (p.I3 - p.I1) * lam
    two_i1 = 2.0 * p.I1
    if F < 0.0:
        return ()
    if F == 0.0:
        return (centre / two_i1,)
    r = math.sqrt(F)
    return ((centre + r) / two_i1, (centre - r) / two_i1)


def hyperbola_residual(p, lam, eta):
    """Left-hand side of ``(2I3-I1)lam^2 + 4(I3-I1)eta lam - 4 I1 eta^2 - 4mgl``."""
    I1, I3 = p.I1, p.I3
    return ((2 * I3 - I1) * lam * lam + 4 * (I3 - I1) * eta * lam
            - 4 * I1 * eta * eta - 4 * p.mgl)


def bisect_change(predicate, lo, hi, tol=BISECT_TOL):
    """Shrink ``[lo, hi]`` around a change of ``predicate`` with ``predicate(lo)`` kept."""
    ref = predicate(lo)
    if predicate(hi) == ref:
        raise ValueError("predicate does not change over the bracket")
    while hi - lo > tol * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if predicate(mid) == ref:
            lo = mid
        else:
            hi = mid
    return lo, hi


# -- sweeps -----------------------------------------------------------------


@dataclass(frozen=True)
class SweepRecord:
    lam: float
    eta: float
    E: float
    F: float
    eigenvalues: tuple
    numeric_eigenvalues: tuple
    cls: SpectrumClass
    boundary: bool = False


@dataclass(frozen=True)
class TransitionEvent:
    lam: float
    kind: str
    before: tuple
    after: tuple


@dataclass
class SweepResult:
    rule: EtaRule
    records: list
    events: list = field(default_factory=list)

    @property
    def transitions(self):
        return [ev.lam for ev in self.events]

    def class_sequence(self):
        out = []
        for rec in self.records:
            if not out or out[-1] != rec.cls:
                out.append(rec.cls)
        return out

    def timeline(self):
        """Class runs interleaved with events, in order of ``lam``.

        Entries are ``("class", SpectrumClass)`` or ``("event", kind, lam)``.
        Consecutive equal classes merge unless an event separates them.
        """
        out = []
        pending = sorted(self.events, key=lambda ev: ev.lam)
        k = 0
        for rec in self.records:
            while k < len(pending) and pending[k].lam < rec.lam:
                ev = pending[k]
                out.append(("event", ev.kind, ev.lam))
                k += 1
            if not out or out[-1] != ("class", rec.cls):
                out.append(("class", rec.cls))
        for ev in pending[k:]:
            out.append(("event", ev.kind, ev.lam))
        return out


def _sign(x):
    return (x > 0) - (x < 0)


def regime(p, lam, eta):
    """Discrete sign pattern whose changes mark transitions (see module doc)."""
    inv = transition_invariants(p, lam, eta)
    E, F = inv.E, inv.F
    if F < 0.0:
        return ("unstable", 0, _sign(E))
    return ("stable", _sign(E * E - F), _sign(E))


def _fill_zeros(regimes):
    """Replace exact-zero signs by a neighbour's on the same side of ``F = 0``.

    A zero on the grid is either a tangency or a crossing that lands exactly
    on a node; in both cases the neighbouring nodes carry the information, and
    zeros at the sweep ends are not transitions.
    """
    out = [list(r) for r in regimes]
    for j in (1, 2):
        for i, r in enumerate(out):
            if r[j] != 0 or (j == 1 and r[0] == "unstable"):
                continue
            if i > 0 and out[i - 1][0] == r[0] and out[i - 1][j] != 0:
                r[j] = out[i - 1][j]
                continue
            for o in out[i + 1:]:
                if o[0] != r[0]:
                    break
                if o[j] != 0:
                    r[j] = o[j]
                    break
    return [tuple(r) for r in out]


def _event_kind(before, after):
    if before[0] != after[0]:
        return "fast_slow"
    if before[0] == "stable" and before[1] != after[1]:
        return "fast_superfast"
    if before[0] == "stable":
        return "double_pairs"
    return "real_double_pair"


def _matches(r, ref):
    return all(a == b or a == 0 for a, b in zip(r[1:], ref[1:])) and r[0] == ref[0]


def _refine(p, rule, lo, hi, r_lo, r_hi, events):
    def pred(lam):
        return _matches(regime(p, lam, rule.eta(p, lam)), r_lo)

    a, b = bisect_change(pred, lo, hi)
    r_b = regime(p, b, rule.eta(p, b))
    events.append(TransitionEvent(0.5 * (a + b), _event_kind(r_lo, r_b), r_lo, r_b))
    if not _matches(r_hi, r_b) and b < hi:
        _refine(p, rule, b, hi, r_b, r_hi, events)


def make_record(p, lam, eta, tol=DEFAULT_TOL, check=True):
    rep = spectrum_report(p, lam, eta, tol)
    numeric = eigenvalues_numeric(linearization(p, lam, eta))
    if check:
        radius = max(abs(z) for z in rep.eigenvalues)
        gap = multiset_distance(rep.eigenvalues, numeric)
        allowed = SWEEP_CHECK_RTOL * (1.0 + radius)
        if abs(rep.invariants.F) <= HOPF_BAND * invariant_scale(p, lam):
            allowed += HOPF_CHECK_RTOL * radius
        if gap > allowed:
            raise InconsistentSpectrum(
                f"closed-form and numeric spectra differ by {gap:.3e} at "
                f"lam={lam!r}, eta={eta!r}")
    return SweepRecord(lam, eta, rep.invariants.E, rep.invariants.F,
                       rep.eigenvalues, numeric, rep.cls, rep.boundary)


def sweep_eigenvalue_paths(p, rule, lambda_min, lambda_max, steps, tol=DEFAULT_TOL):
    """Spectra on a uniform ``lam`` grid plus bisection-refined transitions."""
    if steps < 2:
        raise ValueError("steps must be >= 2")
    if not lambda_min < lambda_max:
        raise ValueError("need lambda_min < lambda_max")
    grid = np.linspace(lambda_min, lambda_max, steps)
    records = [make_record(p, float(lam), rule.eta(p, float(lam)), tol) for lam in grid]
    regimes = _fill_zeros([regime(p, r.lam, r.eta) for r in records])
    events = []
    for (ra, ga), (rb, gb) in zip(zip(records, regimes), zip(records[1:], regimes[1:])):
        if ga != gb:
            _refine(p, rule, ra.lam, rb.lam, ga, gb, events)
    events.sort(key=lambda ev: ev.lam)
    return SweepResult(rule, records, events)


def track_branches(records, collision_rtol=1e-6):
    """Continue eigenvalue branches by nearest-neighbour matching.

    Returns ``(paths, collisions)``: ``paths[k, j]`` is branch ``j`` at step
    ``k`` and ``collisions[k]`` flags steps where two eigenvalues coincide to
    within ``collision_rtol`` of the spectral radius.  Branch identity is not
    meaningful through flagged steps.
    """
    n = len(records)
    paths = np.empty((n, 4), dtype=complex)
    collisions = np.zeros(n, dtype=bool)
    prev = None
    for k, rec in enumerate(records):
        vals = list(rec.eigenvalues)
        if prev is not None:
            vals = list(min(itertools.permutations(vals),
                            key=lambda perm: sum(abs(a - b) for a, b in zip(perm, prev))))
        paths[k] = vals
        radius = max(1.0, max(abs(v) for v in vals))
        gaps = [abs(a - b) for a, b in itertools.combinations(vals, 2)]
        collisions[k] = min(gaps) <= collision_rtol * radius
        prev = vals
    return paths, collisions


# -- (lam, eta) plane --------------------------------------------------------


@dataclass(frozen=True)
class ChartNode:
    lam: float
    eta: float
    E: float
    F: float
    cls: SpectrumClass


@dataclass
class ChartDataset:
    nodes: list
    series: dict
    intersections: dict


def default_chart_window(p):
    tau = fast_slow_threshold(p)
    half = 2.0 * max(1.0, tau)
    return (0.0, 2.0 * tau), (-half, half)


def plane_chart(p, lambda_range=None, eta_range=None, resolution=(101, 101), tol=DEFAULT_TOL):
    """Spectrum classes over a ``(lam, eta)`` grid with the reference curves.

    Series: ``hyperbola_upper`` and ``hyperbola_lower`` (the two branches of
    ``E^2 = F``, sampled in ``lam``), ``L1`` (eta = lam/2) and ``L2`` (E = 0).
    """
    win_l, win_e = default_chart_window(p)
    lambda_range = lambda_range or win_l
    eta_range = eta_range or win_e
    if isinstance(resolution, int):
        resolution = (resolution, resolution)
    nl, ne = resolution
    if nl < 2 or ne < 2:
        raise ValueError("resolution must be >= 2 on each axis")
    lams = np.linspace(*lambda_range, nl)
    etas = np.linspace(*eta_range, ne)

    nodes = []
    for lam in lams:
        for eta in etas:
            rep = spectrum_report(p, float(lam), float(eta), tol)
            nodes.append(ChartNode(float(lam), float(eta), rep.invariants.E,
                                   rep.invariants.F, rep.cls))

    tau = fast_slow_threshold(p)
    hyp_lams = sorted(set(float(x) for x in lams)
                      | {x for x in (tau, -tau) if lambda_range[0] <= x <= lambda_range[1]})
    upper, lower = [], []
    for lam in hyp_lams:
        roots = hyperbola_eta(p, lam)
        if len(roots) == 1 or abs(lam) == tau:
            # vertex: both branches meet at the centre value
            c = (p.I3 - p.I1) * lam / (2.0 * p.I1)
            upper.append((lam, c))
            lower.append((lam, c))
        elif roots:
            upper.append((lam, roots[0]))
            lower.append((lam, roots[1]))
    series = {
        "hyperbola_upper": upper,
        "hyperbola_lower": lower,
        "L1": [(float(l), 0.5 * float(l)) for l in lams],
        "L2": [(float(l), optimal_eta(p, float(l))) for l in lams],
    }

    lewis = fast_superfast_lewis(p)
    l1_hits = []
    if lewis is not None:
        for lam in (-lewis, lewis):
            if lambda_range[0] <= lam <= lambda_range[1]:
                l1_hits.append((lam, 0.5 * lam))
    # On E = 0 the hyperbola is only reached where F = 0.
    l2_hits = [(lam, optimal_eta(p, lam)) for lam in (-tau, tau)
               if lambda_range[0] <= lam <= lambda_range[1]]
    return ChartDataset(nodes, series, {"L1": l1_hits, "L2": l2_hits})
