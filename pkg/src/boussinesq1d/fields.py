"""Initial data for the blow-up scenario and the Lagrangian particle state.

Profiles are built from the flat-at-the-endpoints transition function

    s(y) = g(y) / (g(y) + c g(1 - y)),   g(y) = exp(-1/y) for y > 0,

which is C-infinity, equals 0 for y <= 0 and 1 for y >= 1, and is strictly
increasing in between.  The weight ``c`` moves the point where s = 1/2.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

# s_c(1/3) = 1/2 for this weight, which pins rho0(1/3) = 1
RHO_WEIGHT = np.exp(-1.5)

PLATEAU = (0.3, 0.45)
RHO_SUPPORT = (0.25, 0.75)
OMEGA_SUPPORT = (0.25, 0.5)


def _g(y):
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    pos = y > 0
    out[pos] = np.exp(-1.0 / y[pos])
    return out


def transition(y, weight=1.0):
    """Smooth monotone step from 0 (y <= 0) to 1 (y >= 1)."""
    y = np.clip(np.asarray(y, dtype=float), 0.0, 1.0)
    a = _g(y)
    return a / (a + weight * _g(1.0 - y))


@dataclass(frozen=True)
class SmoothProfile:
    """A compactly supported profile on [0, 1].

    ``segments`` lists ``(lo, hi, kind)`` with kind one of ``"increasing"``,
    ``"decreasing"`` or ``"constant"``; these are the monotonicity claims
    checked by :meth:`check`.
    """

    rule: Callable[[np.ndarray], np.ndarray]
    support: tuple[float, float]
    segments: tuple[tuple[float, float, str], ...] = ()
    name: str = ""

    def __call__(self, x):
        xa = np.asarray(x, dtype=float)
        a, b = self.support
        inside = (xa >= a) & (xa <= b)
        out = np.zeros_like(xa)
        if np.any(inside):
            out[inside] = self.rule(xa[inside])
        if out.ndim == 0:
            return float(out)
        return out

    def check(self, samples: int = 10_000, h: float = 1e-6, tol: float = 1e-6) -> list[str]:
        """Return a list of violated invariants (empty when the profile is sound)."""
        problems = []
        a, b = self.support
        if not 0.0 <= a < b <= 1.0:
            problems.append(f"support {self.support} not inside [0, 1]")
        for edge in (a, b):
            f = self(np.array([edge - h, edge, edge + h]))
            d1 = (f[2] - f[0]) / (2 * h)
            d2 = (f[2] - 2 * f[1] + f[0]) / h**2
            if abs(f[1]) > tol or abs(d1) > tol or abs(d2) > tol:
                problems.append(f"not flat at support edge {edge}: {f[1]}, {d1}, {d2}")
        for lo, hi, kind in self.segments:
            v = self(np.linspace(lo, hi, samples))
            dv = np.diff(v)
            ok = {
                "increasing": np.all(dv >= 0),
                "decreasing": np.all(dv <= 0),
                "constant": np.all(dv == 0),
            }[kind]
            if not ok:
                problems.append(f"segment [{lo}, {hi}] is not {kind}")
        return problems

    @classmethod
    def tabulated(cls, x: Sequence[float], y: Sequence[float], name: str = "tabulated") -> "SmoothProfile":
        """Monotone cubic interpolant through user-supplied samples."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or x.size < 2:
            raise ValueError("tabulated profile needs matching 1D arrays with at least two points")
        if np.any(np.diff(x) <= 0):
            raise ValueError("tabulated abscissae must be strictly increasing")
        interp = PchipInterpolator(x, y, extrapolate=False)
        return cls(rule=lambda s: np.nan_to_num(interp(s)), support=(float(x[0]), float(x[-1])), name=name)


def zero_profile() -> SmoothProfile:
    return SmoothProfile(rule=np.zeros_like, support=(0.0, 1.0), segments=((0.0, 1.0, "constant"),), name="zero")


def build_rho0() -> SmoothProfile:
    """Density bump on [1/4, 3/4] with rho0(1/3) = 1 and max rho0(1/2) = 2."""

    def rule(x):
        out = np.empty_like(x)
        left = x <= 0.5
        out[left] = 2.0 * transition(4.0 * (x[left] - 0.25), RHO_WEIGHT)
        out[~left] = 2.0 * transition(4.0 * (0.75 - x[~left]))
        return out

    profile = SmoothProfile(
        rule=rule,
        support=RHO_SUPPORT,
        segments=((0.25, 0.5, "increasing"), (0.5, 0.75, "decreasing")),
        name="rho0",
    )
    _self_check(profile)
    pins = profile(np.array([1.0 / 3.0, 0.5]))
    if abs(pins[0] - 1.0) > 1e-12 or abs(pins[1] - 2.0) > 1e-12 or profile(np.linspace(0, 1, 10_001)).max() > 2.0:
        raise RuntimeError(f"rho0 pinning failed: rho0(1/3)={pins[0]!r}, rho0(1/2)={pins[1]!r}")
    return profile


def build_omega0(M: float) -> SmoothProfile:
    """Vorticity bump on [1/4, 1/2], identically ``M`` on [0.3, 0.45]."""
    if not M > 0:
        raise ValueError(f"plateau height M must be positive, got {M!r}")
    lo, hi = PLATEAU
    a, b = OMEGA_SUPPORT

    def rule(x):
        out = np.full_like(x, float(M))
        up = x < lo
        down = x > hi
        out[up] = M * transition((x[up] - a) / (lo - a))
        out[down] = M * transition((b - x[down]) / (b - hi))
        return out

    profile = SmoothProfile(
        rule=rule,
        support=OMEGA_SUPPORT,
        segments=((a, lo, "increasing"), (lo, hi, "constant"), (hi, b, "decreasing")),
        name=f"omega0(M={M:g})",
    )
    _self_check(profile)
    return profile


def _self_check(profile: SmoothProfile) -> None:
    problems = profile.check()
    if problems:
        raise RuntimeError(f"{profile.name} construction failed: " + "; ".join(problems))


def find_xn(rho0: SmoothProfile, n: int) -> float:
    """Point on the increasing branch where rho0 = 1/2 + 2**-n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    target = 0.5 + 2.0 ** (-n)
    lo, hi = 0.25, 0.5
    if not rho0(lo) < target <= rho0(hi):
        raise ValueError(f"target {target} outside the range of the increasing branch")
    return brentq(lambda x: rho0(x) - target, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


@dataclass(frozen=True)
class InitialData:
    rho0: SmoothProfile
    omega0: SmoothProfile
    M: float = 0.0

    @classmethod
    def blowup(cls, M: float) -> "InitialData":
        """The two-bump data of the finite-time blow-up construction."""
        omega0 = build_omega0(M) if M > 0 else zero_profile()
        return cls(rho0=build_rho0(), omega0=omega0, M=float(M))

    @classmethod
    def zero(cls) -> "InitialData":
        return cls(rho0=zero_profile(), omega0=zero_profile(), M=0.0)

    @classmethod
    def transport_only(cls, M: float) -> "InitialData":
        return cls(rho0=zero_profile(), omega0=build_omega0(M), M=float(M))


@dataclass(frozen=True)
class ParticleState:
    """Particles with fixed labels moving along characteristics.

    ``rho`` is stored once per particle and never updated: density is
    conserved along characteristics.  ``broken`` marks a state whose
    positions lost their strict ordering.
    """

    t: float
    labels: np.ndarray
    phi: np.ndarray
    rho: np.ndarray
    omega: np.ndarray
    broken: bool = False

    def __post_init__(self):
        n = self.labels.shape
        if not (self.phi.shape == self.rho.shape == self.omega.shape == n):
            raise ValueError("particle arrays must share one shape")

    @property
    def size(self) -> int:
        return self.labels.size

    def index_of(self, label: float) -> int:
        """Index of the particle carrying exactly this label."""
        i = int(np.searchsorted(self.labels, label))
        if i >= self.size or self.labels[i] != label:
            raise KeyError(f"label {label!r} is not tracked")
        return i

    def position_of(self, label: float) -> float:
        return float(self.phi[self.index_of(label)])

    def ordered(self) -> bool:
        return bool(np.all(np.diff(self.phi) > 0))

    def evolve(self, **changes) -> "ParticleState":
        return replace(self, **changes)


def graded_labels(N: int, refine_at: Sequence[float] = (), eps: float = 1e-3, samples: int = 200_001) -> np.ndarray:
    """N+1 labels on [0, 1] with density ~ 1/(|x - 1/4| + eps) near 1/4 and near each refine_at point."""
    s = np.linspace(0.0, 1.0, samples)
    density = 1.0 + 0.05 / (np.abs(s - 0.25) + eps)
    if len(refine_at):
        w = 0.05 / len(refine_at)
        for p in refine_at:
            density += w / (np.abs(s - p) + eps)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (density[1:] + density[:-1]) * np.diff(s))])
    cdf /= cdf[-1]
    labels = np.interp(np.linspace(0.0, 1.0, N + 1), cdf, s)
    labels[0], labels[-1] = 0.0, 1.0
    return labels


def insert_labels(labels: np.ndarray, extra: Sequence[float], snap: float = 0.25) -> np.ndarray:
    """Add exact labels, moving an existing label onto a new one when closer than ``snap`` local spacings."""
    labels = np.array(labels, dtype=float)
    placed: set[float] = set()
    for p in sorted(set(float(e) for e in extra)):
        if not 0.0 < p < 1.0:
            raise ValueError(f"extra label {p} must lie strictly inside (0, 1)")
        i = int(np.searchsorted(labels, p))
        if labels[i] == p:
            continue
        spacing = labels[i] - labels[i - 1]
        if i < labels.size - 1 and labels[i] not in placed and labels[i] - p < snap * spacing:
            labels[i] = p
        elif i - 1 > 0 and labels[i - 1] not in placed and p - labels[i - 1] < snap * spacing:
            labels[i - 1] = p
        else:
            labels = np.insert(labels, i, p)
        placed.add(p)
    return labels


def discretize(
    data: InitialData,
    N: int,
    layout: str = "uniform",
    extra_labels: Sequence[float] = (),
    refine_at: Sequence[float] = (),
) -> ParticleState:
    """Sample the initial data on N+1 labels (plus any ``extra_labels``) at t = 0."""
    if N < 16:
        raise ValueError(f"need at least 16 particles, got N={N}")
    if layout == "uniform":
        labels = np.arange(N + 1, dtype=float) / N
    elif layout == "graded":
        labels = graded_labels(N, refine_at)
    else:
        raise ValueError(f"unknown layout {layout!r}")
    labels = insert_labels(labels, extra_labels)
    return ParticleState(
        t=0.0,
        labels=labels,
        phi=labels.copy(),
        rho=np.asarray(data.rho0(labels), dtype=float),
        omega=np.asarray(data.omega0(labels), dtype=float),
    )
