"""Nonlinear heavy-top integration on SO(3) x R^3.

Attitudes are advanced multiplicatively, ``Lambda <- exp(hat(u)) Lambda``, so
they stay on SO(3) up to rounding without renormalization.  ``lierk4`` is the
Runge-Kutta-Munthe-Kaas method built on classical RK4; ``liemidpoint`` is the
implicit exponential midpoint rule (second order, time symmetric), solved by
fixed-point iteration.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import E3, PhasePoint, tilt_angle, tilted_sleeping_point

SCHEMES = {"lierk4": 0, "liemidpoint": 1}


class StepRejected(RuntimeError):
    def __init__(self, step, t):
        super().__init__(f"non-finite state at step {step} (t={t:g})")
        self.step = step
        self.t = t


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1e-3
    t_end: float = 100.0
    scheme: str = "lierk4"
    renorm_check_interval: int = 10

    def __post_init__(self):
        if not self.dt > 0 or not math.isfinite(self.dt):
            raise ValueError("dt must be positive")
        if not self.t_end > 0 or not math.isfinite(self.t_end):
            raise ValueError("t_end must be positive")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {sorted(SCHEMES)}")
        if int(self.renorm_check_interval) < 1:
            raise ValueError("renorm_check_interval must be >= 1")

    @property
    def nsteps(self):
        return max(1, int(math.ceil(self.t_end / self.dt - 1e-9)))


@dataclass
class Trajectory:
    times: np.ndarray
    attitudes: np.ndarray
    momenta: np.ndarray
    energy: np.ndarray
    j1: np.ndarray
    j2: np.ndarray

    def __len__(self):
        return len(self.times)

    def point(self, i):
        return PhasePoint(self.attitudes[i], self.momenta[i])

    @property
    def tilt(self):
        return tilt_angle(self.attitudes)


@dataclass(frozen=True)
class ConservationReport:
    energy_rel_drift: float
    j1_drift: float
    j2_drift: float
    orthogonality_defect: float

    def as_dict(self):
        return {
            "energy_rel_drift": self.energy_rel_drift,
            "j1_drift": self.j1_drift,
            "j2_drift": self.j2_drift,
            "orthogonality_defect": self.orthogonality_defect,
        }


@dataclass
class ProbeResult:
    max_tilt: float
    growth_rate: float
    trajectory: Trajectory
    fit_window: tuple = None


def energies(p, attitudes, momenta):
    """Energy and both momentum-map components for stacked samples."""
    body = np.einsum("nji,nj->ni", attitudes, momenta)
    inv = np.array([1.0 / p.I1, 1.0 / p.I1, 1.0 / p.I3])
    kinetic = 0.5 * np.sum(body * body * inv, axis=1)
    energy = p.mgl * attitudes[:, 2, 2] + kinetic
    j1 = momenta @ E3
    j2 = -np.einsum("ni,ni->n", momenta, attitudes[:, :, 2])
    return energy, j1, j2


def integrate(p, z0, cfg=IntegratorConfig(), backend=None):
    kern = kernels.get_backend(backend)
    n = cfg.nsteps
    every = int(cfg.renorm_check_interval)
    rows = 1 + n // every + (1 if n % every else 0)
    out = np.zeros((rows, 12))
    status = kern.run(SCHEMES[cfg.scheme], np.ascontiguousarray(z0.Lambda.ravel()),
                      np.ascontiguousarray(z0.pi, dtype=float), p.mgl, p.I1, p.I3,
                      float(cfg.dt), n, every, out)
    if status != -1:
        raise StepRejected(status, status * cfg.dt)
    steps = np.arange(0, n + 1, every)
    if steps[-1] != n:
        steps = np.append(steps, n)
    times = steps * cfg.dt
    attitudes = out[:, :9].reshape(-1, 3, 3)
    momenta = out[:, 9:].copy()
    energy, j1, j2 = energies(p, attitudes, momenta)
    return Trajectory(times, attitudes, momenta, energy, j1, j2)


def conservation_report(p, traj):
    """Drift of the energy (relative to ``max(|H0|, mgl)``) and momentum components."""
    e0 = traj.energy[0]
    denom = max(abs(e0), p.mgl)
    eye = np.eye(3)
    defect = np.max(np.abs(np.einsum("nki,nkj->nij", traj.attitudes, traj.attitudes) - eye))
    return ConservationReport(
        float(np.max(np.abs(traj.energy - e0)) / denom),
        float(np.max(np.abs(traj.j1 - traj.j1[0]))),
        float(np.max(np.abs(traj.j2 - traj.j2[0]))),
        float(defect),
    )


def fit_growth_rate(times, tilts, tilt0, upper=0.1):
    """Slope of ``log(tilt)`` over the window ``10*tilt0 <= tilt <= upper``.

    The window starts at the first sample reaching ``10*tilt0`` and ends just
    before the first later sample exceeding ``upper``.  Returns
    ``(rate, (t_start, t_stop))`` or ``(None, None)`` if fewer than three
    samples qualify.
    """
    tilts = np.asarray(tilts)
    above = np.nonzero(tilts >= 10.0 * tilt0)[0]
    if len(above) == 0:
        return None, None
    start = above[0]
    over = np.nonzero(tilts[start:] > upper)[0]
    stop = start + over[0] if len(over) else len(tilts)
    if stop - start < 3:
        return None, None
    t = times[start:stop]
    slope, _ = np.polyfit(t, np.log(tilts[start:stop]), 1)
    return float(slope), (float(t[0]), float(t[-1]))


def perturbation_probe(p, lam, tilt, cfg=IntegratorConfig(), backend=None):
    """Tip the sleeping top by ``tilt`` about e1 and watch the axis."""
    if not tilt > 0:
        raise ValueError("tilt must be positive")
    traj = integrate(p, tilted_sleeping_point(p, lam, tilt), cfg, backend)
    tilts = traj.tilt
    rate, window = fit_growth_rate(traj.times, tilts, tilt)
    return ProbeResult(float(np.max(tilts)), rate, traj, window)


def crossing_frequency(times, signal):
    """Angular frequency from the mean spacing of sign changes (linear interpolation)."""
    s = np.asarray(signal)
    idx = np.nonzero(np.signbit(s[:-1]) != np.signbit(s[1:]))[0]
    if len(idx) < 3:
        return None
    t0, t1 = times[idx], times[idx + 1]
    crossings = t0 - s[idx] * (t1 - t0) / (s[idx + 1] - s[idx])
    half_period = np.mean(np.diff(crossings))
    return float(math.pi / half_period)
