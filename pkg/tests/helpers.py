"""Random smooth test fields shared by property tests."""
import numpy as np

from boussinesq1d.fields import ParticleState


def bump(x, a, b):
    """C-infinity bump supported on [a, b], peak 1."""
    s = (2 * np.asarray(x, dtype=float) - a - b) / (b - a)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1
    out[inside] = np.exp(1 - 1 / (1 - s[inside] ** 2))
    return out


def random_bumps(rng, k_max=3, lo=0.02):
    """Callable sum of 1..k_max signed bumps with supports in [lo, 1)."""
    k = int(rng.integers(1, k_max + 1))
    params = []
    for _ in range(k):
        a = rng.uniform(lo, 0.9)
        b = rng.uniform(a + 0.02, min(1.0, a + 0.5))
        params.append((a, b, rng.uniform(-5, 5)))
    return lambda x: sum(c * bump(x, a, b) for a, b, c in params)


def random_state(rng, N=2000):
    """Particle state on a jittered mesh carrying a random smooth vorticity."""
    x = np.linspace(0, 1, N + 1)
    x[1:-1] += rng.uniform(-0.3, 0.3, N - 1) / N
    w = random_bumps(rng)(x)
    return ParticleState(0.0, x, x.copy(), np.zeros_like(x), w)


ACCEPTANCE_LINES: list[str] = []


def report(label, ok, detail):
    """Record and print one acceptance line."""
    line = f"{'PASS' if ok else 'FAIL'} {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return bool(ok)
