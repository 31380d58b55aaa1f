"""Reflected diffusions on the model geometries and their path functionals.

The coordinate SDE is  dx = (b + Z)(x) dt + sqrt(2) dB + dL_wall,  so the
generator matches the weighted reduction of the geometry module and the
boundary local time L is accumulated in the same normalisation as the
path weights e^{-2 int (K dr + sigma dL)}.

Two wall schemes:

  * "bridge" (default): per step, sample the free endpoint together with
    the running minimum of the Brownian bridge across the step and apply
    the one-wall pushing map.  For the flat boundary families with zero
    drift the per-step transition of (position, local time) is exact, so
    local-time functionals carry no O(sqrt(dt)) grid bias.
  * "projection": clip the Euler endpoint back into the domain, local
    time increment = clipping distance.  Simpler, but the local time
    inherits the classical 0.82 sqrt(dt) deficit of grid suprema; kept
    for convergence reporting.

All estimators draw from one seeded generator in a fixed order and reduce
with compensated sums, so results are bit-reproducible for a given
(seed, dt, n_paths) and independent of worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .clocks import Clock
from .geometry import ModelManifold
from .numerics import mean_and_stderr

_CURVED = (geometry.SPHERE, geometry.HYPERBOLIC, geometry.EUCLIDEAN_RADIAL)


@dataclass(frozen=True)
class PathSample:
    """One discretised reflected trajectory with accumulated integrals."""

    manifold: ModelManifold
    dt: float
    seed: int
    scheme: str
    times: np.ndarray          # s_k = k dt, length steps+1
    x: np.ndarray              # positions, length steps+1
    dL: np.ndarray             # per-step local-time increments, length steps
    A: np.ndarray              # int_0^{s_k} K(X_r) dr (left point)
    B: np.ndarray              # int_0^{s_k} sigma(X_r) dL_r
    rejected: int = 0          # chart-guard resample events

    @property
    def L(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.dL)])

    def to_csv(self, path) -> None:
        """Raw per-step dump (diagnostics): s, x, dL, A, B."""
        header = (f"family={self.manifold.family},dt={self.dt},"
                  f"seed={self.seed},scheme={self.scheme},"
                  f"rejected={self.rejected}\ns,x,dL,A,B")
        dL = np.concatenate([[0.0], self.dL])
        data = np.column_stack([self.times, self.x, dL, self.A, self.B])
        np.savetxt(path, data, delimiter=",", header=header, comments="# ")


@dataclass(frozen=True)
class Estimate:
    functional_id: str
    value: float
    stderr: float
    n_paths: int
    dt: float
    seed: int
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"functional_id": self.functional_id, "value": self.value,
                "stderr": self.stderr, "n_paths": self.n_paths,
                "dt": self.dt, "seed": self.seed, **self.meta}


def _as_field(value, default: float):
    """Normalise a field spec (None | scalar | callable) to (is_const, f)."""
    if value is None:
        return True, float(default)
    if callable(value):
        return False, value
    return True, float(value)


class _Stepper:
    """Vectorised one-step transition for a batch of paths."""

    def __init__(self, M: ModelManifold, dt: float, scheme: str):
        if scheme not in ("bridge", "projection"):
            raise ValueError(f"unknown reflection scheme {scheme!r}")
        self.M = M
        self.dt = dt
        self.scheme = scheme
        self.c = math.sqrt(2.0 * dt)
        self.boundaries = M.boundaries()
        self.flat_driftless = (M.family not in _CURVED and M.drift_id == "none")
        lo, hi, kind = M.domain()
        self.wrap = kind == "periodic"
        self.guard = (lo + 1e-9, hi - 1e-9) if M.family in _CURVED else None
        self.rejected = 0

    def __call__(self, x: np.ndarray, rng, dL: np.ndarray) -> np.ndarray:
        dt, c = self.dt, self.c
        xi = rng.standard_normal(x.shape)
        if self.flat_driftless:
            y = x + c * xi
        else:
            y = x + self.M.b_total(x) * dt + c * xi
        if self.wrap:
            return np.mod(y, 2.0 * math.pi)
        if self.guard is not None:
            lo_g, hi_g = self.guard
            bad = (y <= lo_g) | (y >= hi_g)
            tries = 0
            while np.any(bad):
                self.rejected += int(np.count_nonzero(bad))
                xi_new = rng.standard_normal(int(np.count_nonzero(bad)))
                y[bad] = (x[bad] + self.M.b_total(x[bad]) * dt + c * xi_new)
                bad = (y <= lo_g) | (y >= hi_g)
                tries += 1
                if tries > 100:
                    np.clip(y, lo_g, hi_g, out=y)
                    break
            return y
        dL.fill(0.0)
        for pos, direction in self.boundaries:
            if self.scheme == "bridge":
                E = rng.standard_exponential(x.shape)
                if direction > 0:
                    a, b = x - pos, y - pos
                else:
                    a, b = pos - x, pos - y
                dist = a - b
                mmin = 0.5 * (a + b - np.sqrt(dist * dist + 4.0 * dt * E))
                push = np.maximum(0.0, -mmin)
            else:
                push = np.maximum(0.0, (pos - y) * direction)
            y += direction * push
            dL += push
        return y


def simulate_reflected_path(M: ModelManifold, x0: float, t: float, dt: float,
                            seed: int, scheme: str = "bridge") -> PathSample:
    """One reflected trajectory on [0, t] with local time and weights.

    Reproducible for fixed (seed, dt); the path weight integrals A and B
    are accumulated with the manifold's constant K and sigma by the
    left-point rule.
    """
    if dt <= 0 or t <= 0:
        raise ValueError("need t > 0 and dt > 0")
    steps = int(round(t / dt))
    if abs(steps * dt - t) > 1e-9 * t:
        steps = int(t / dt)  # truncate to a multiple of dt
    rng = np.random.default_rng(seed)
    stepper = _Stepper(M, dt, scheme)
    x = np.array([float(x0)])
    xs = np.empty(steps + 1)
    dLs = np.empty(steps)
    xs[0] = x[0]
    dL = np.zeros(1)
    sigma = M.sigma if M.sigma is not None else 0.0
    A = np.empty(steps + 1)
    B = np.empty(steps + 1)
    A[0] = B[0] = 0.0
    for k in range(steps):
        A[k + 1] = A[k] + M.K * dt
        x = stepper(x, rng, dL)
        xs[k + 1] = x[0]
        dLs[k] = dL[0]
        B[k + 1] = B[k] + sigma * dL[0]
    times = np.arange(steps + 1) * dt
    return PathSample(manifold=M, dt=dt, seed=seed, scheme=scheme,
                      times=times, x=xs, dL=dLs, A=A, B=B,
                      rejected=stepper.rejected)


def path_weight(sample: PathSample, K_field=None, sigma_field=None,
                s: float | None = None) -> float:
    """Exponential weight e^{-2 (A(s) + B(s))} along one stored path.

    Fields default to the manifold constants the sample was built with;
    callables re-accumulate by the left-point rule over the stored path.
    """
    t_end = sample.times[-1]
    if s is None:
        s = t_end
    if s < 0 or s > t_end + 1e-12:
        raise ValueError("s outside the sampled horizon")
    k = min(int(round(s / sample.dt)), sample.times.size - 1)
    if K_field is None and sigma_field is None:
        return math.exp(-2.0 * (sample.A[k] + sample.B[k]))
    kc, kf = _as_field(K_field, sample.manifold.K)
    sc, sf = _as_field(sigma_field, sample.manifold.sigma or 0.0)
    if kc:
        A = kf * sample.dt * k
    else:  # left-point rule over the first k stored positions
        A = float(np.sum(kf(sample.x[:k])) * sample.dt) if k else 0.0
    if sc:
        B = sf * float(np.sum(sample.dL[:k]))
    else:
        # sigma lives on the boundary: evaluate at the nearest wall
        B = 0.0
        for j in range(k):
            if sample.dL[j] > 0:
                walls = [pos for pos, _ in sample.manifold.boundaries()]
                wall = min(walls, key=lambda p: abs(sample.x[j + 1] - p))
                B += float(sf(wall)) * sample.dL[j]
    return math.exp(-2.0 * (A + B))


# ---------------------------------------------------------------------------
# batched estimators

FUNCTIONALS = ("harnack_rhs", "harnack_alpha_rhs", "gradient_rhs")


def estimate_functional(M: ModelManifold, u0, x: float, t: float,
                        clock: Clock | None, functional_id: str,
                        n_paths: int, dt: float, seed: int,
                        K_field=None, sigma_field=None,
                        alpha: float | None = None,
                        scheme: str = "bridge") -> Estimate:
    """Monte Carlo estimate of one probabilistic right-hand side.

    harnack_rhs:
        (n/2) E[u0(X_t) int_0^t l'^2 w_s ds] - E[Lu0(X_t) int (l^2)' w_s ds]
        with w_s = e^{-2 int_0^s (K dr + sigma dL)}, left-point rule.
    harnack_alpha_rhs:
        (n a/2) E[u0(X_t) int (K l/(a-1) + l')^2 e^{2 int K dr /(a-1)} ds].
    gradient_rhs:
        E[ |grad u0|(X_t) e^{-int (K dr + sigma dL)} ].

    u0 must expose callables on the manifold (analytic datum ids).  When
    K is a constant and sigma vanishes the clock integrals are
    deterministic and computed once; only the endpoint evaluation of u0
    carries Monte Carlo noise then.
    """
    if functional_id not in FUNCTIONALS:
        raise ValueError(f"unknown functional {functional_id!r}")
    if n_paths < 2:
        raise ValueError("need at least two paths")
    if functional_id != "gradient_rhs" and clock is None:
        raise ValueError("this functional needs a deterministic clock")
    u_call, du_call, d2u_call = u0.callables(M)
    kc, kf = _as_field(K_field, M.K)
    sc, sf = _as_field(sigma_field, M.sigma if M.sigma is not None else 0.0)
    sigma_zero = sc and sf == 0.0
    steps = int(round(t / dt))
    svals = np.arange(steps) * dt

    need_alpha = functional_id == "harnack_alpha_rhs"
    if need_alpha and (alpha is None or alpha <= 1):
        raise ValueError("harnack_alpha_rhs needs alpha > 1")
    if need_alpha and M.has_boundary and not sigma_zero:
        raise ValueError("the alpha functional is stated for convex walls "
                         "(sigma = 0)")
    if not sc and len(M.boundaries()) > 1:
        raise ValueError("callable sigma needs a single wall to attribute "
                         "local time to; use a constant on the interval")

    lv = clock.l(svals) if clock is not None else None
    dlv = clock.dl(svals) if clock is not None else None

    # deterministic weight: the clock integrals are constants, so evaluate
    # them by exact quadrature; the left-point rule is kept for pathwise
    # weights where it matches the Ito convention.
    const_weight = kc and (sigma_zero or not M.has_boundary)
    i1_const = i2_const = q_const = 0.0
    if const_weight and functional_id == "harnack_rhs":
        from .clocks import clock_integrals
        ints = clock_integrals(clock, kf)
        i1_const = ints["deriv_sq"]
        i2_const = ints["sq_prime"]
    if const_weight and need_alpha:
        from .clocks import alpha_form_integral
        q_const = alpha_form_integral(clock, kf, alpha)

    rng = np.random.default_rng(seed)
    stepper = _Stepper(M, dt, scheme)
    xp = np.full(n_paths, float(x))
    dL = np.zeros(n_paths)
    A = np.zeros(n_paths)   # int K(X) dr, left point
    B = np.zeros(n_paths)   # int sigma dL
    I1 = np.zeros(n_paths)
    I2 = np.zeros(n_paths)
    track_B = M.has_boundary and not sigma_zero

    for k in range(steps):
        if not const_weight:
            if functional_id == "harnack_rhs":
                if kc:
                    w = np.exp(-2.0 * (kf * svals[k] + B))
                else:
                    w = np.exp(-2.0 * (A + B))
                I1 += dlv[k] ** 2 * w * dt
                I2 += 2.0 * lv[k] * dlv[k] * w * dt
            elif need_alpha:
                v = np.exp(2.0 * A / (alpha - 1.0))
                kk = kf if kc else kf(xp)
                I1 += (kk * lv[k] / (alpha - 1.0) + dlv[k]) ** 2 * v * dt
        if not kc:
            A += kf(xp) * dt
        xp = stepper(xp, rng, dL)
        if track_B:
            B += (sf if sc else sf(M.boundaries()[0][0])) * dL

    if functional_id == "harnack_rhs":
        Lu0_final = d2u_call(xp) + M.b_total(xp) * du_call(xp)
        if const_weight:
            per_path = 0.5 * M.n * u_call(xp) * i1_const - Lu0_final * i2_const
        else:
            per_path = 0.5 * M.n * u_call(xp) * I1 - Lu0_final * I2
    elif need_alpha:
        total = q_const if const_weight else I1
        per_path = 0.5 * M.n * alpha * u_call(xp) * total
    else:  # gradient_rhs
        A_final = kf * t if kc else A
        per_path = np.abs(du_call(xp)) * np.exp(-(A_final + B))

    value, stderr = mean_and_stderr(np.asarray(per_path, dtype=float))
    return Estimate(functional_id=functional_id, value=value, stderr=stderr,
                    n_paths=n_paths, dt=dt, seed=seed,
                    meta={"manifold": M.family, "t": t, "x0": x,
                          "rejected": stepper.rejected})


def local_time_moment(M: ModelManifold, x0: float, t: float, p: float,
                      n_paths: int, dt: float, seed: int,
                      scheme: str = "bridge") -> Estimate:
    """E[e^{p L_t}], accumulated in log space to dodge overflow."""
    if not M.has_boundary:
        raise ValueError("local time needs a boundary family")
    if p == 0.0:
        return Estimate("local_time_moment", 1.0, 0.0, n_paths, dt, seed,
                        meta={"p": p, "manifold": M.family, "t": t})
    steps = int(round(t / dt))
    rng = np.random.default_rng(seed)
    stepper = _Stepper(M, dt, scheme)
    x = np.full(n_paths, float(x0))
    L = np.zeros(n_paths)
    dL = np.zeros(n_paths)
    for _ in range(steps):
        x = stepper(x, rng, dL)
        L += dL
    z = p * L
    shift = float(np.max(z))
    vals = np.exp(z - shift)
    mean, se = mean_and_stderr(vals)
    return Estimate("local_time_moment", mean * math.exp(shift),
                    se * math.exp(shift), n_paths, dt, seed,
                    meta={"p": p, "manifold": M.family, "t": t,
                          "mean_L": float(np.mean(L))})


def expected_local_time(M: ModelManifold, x0: float, t: float, n_paths: int,
                        dt: float, seed: int,
                        scheme: str = "bridge") -> Estimate:
    """E[L_t], the mean accumulated boundary local time."""
    if not M.has_boundary:
        raise ValueError("local time needs a boundary family")
    steps = int(round(t / dt))
    rng = np.random.default_rng(seed)
    stepper = _Stepper(M, dt, scheme)
    x = np.full(n_paths, float(x0))
    L = np.zeros(n_paths)
    dL = np.zeros(n_paths)
    for _ in range(steps):
        x = stepper(x, rng, dL)
        L += dL
    mean, se = mean_and_stderr(L)
    return Estimate("expected_local_time", mean, se, n_paths, dt, seed,
                    meta={"manifold": M.family, "t": t, "x0": x0})


def expected_value_at(M: ModelManifold, u0, x0: float, t: float,
                      n_paths: int, dt: float, seed: int,
                      scheme: str = "bridge") -> Estimate:
    """E[u0(X_t)]; matches the solver's u_t(x0) by the path representation."""
    steps = int(round(t / dt))
    rng = np.random.default_rng(seed)
    stepper = _Stepper(M, dt, scheme)
    x = np.full(n_paths, float(x0))
    dL = np.zeros(n_paths)
    for _ in range(steps):
        x = stepper(x, rng, dL)
    u_call, _, _ = u0.callables(M)
    mean, se = mean_and_stderr(u_call(x))
    return Estimate("expected_value", mean, se, n_paths, dt, seed,
                    meta={"manifold": M.family, "t": t, "x0": x0})


# ---------------------------------------------------------------------------
# time change by a cutoff function


@dataclass(frozen=True)
class TimeChange:
    """Discrete clock T(s) = int f^{-2}(X) dr and its inverse on one path."""

    times: np.ndarray
    T: np.ndarray
    f_values: np.ndarray
    exit_index: int | None
    truncated: bool

    def tau(self, t):
        """Inverse clock by linear interpolation; tau(t) <= t when f <= 1."""
        t = np.asarray(t, dtype=float)
        out = np.interp(t, self.T[:self.last + 1], self.times[:self.last + 1])
        return out if out.ndim else float(out)

    @property
    def last(self) -> int:
        return self.exit_index if self.exit_index is not None else self.T.size - 1

    def roundtrip_error(self, t) -> float:
        return float(np.max(np.abs(self.T_of(self.tau(t)) - np.asarray(t))))

    def T_of(self, s):
        s = np.asarray(s, dtype=float)
        out = np.interp(s, self.times[:self.last + 1], self.T[:self.last + 1])
        return out if out.ndim else float(out)


def time_change(sample: PathSample, f, f_floor: float = 1e-8) -> TimeChange:
    """Clock of the time-changed diffusion for a cutoff f on one path.

    f must take values in (0, 1] inside the domain and 0 on the inner
    boundary; the path is truncated and flagged where f drops below the
    floor before a recorded exit.
    """
    fv = np.asarray(f(sample.x), dtype=float)
    if np.any(fv > 1.0 + 1e-12):
        raise ValueError("cutoff must satisfy f <= 1")
    exit_idx = None
    truncated = False
    n = fv.size
    stop = n
    below = np.nonzero(fv <= f_floor)[0]
    if below.size:
        stop = int(below[0])
        exit_idx = stop - 1 if stop > 0 else 0
        truncated = bool(fv[stop] > 0.0)
    T = np.zeros(n)
    inv = np.zeros(n)
    inv[:max(stop, 1)] = fv[:max(stop, 1)] ** -2.0
    T[1:] = np.cumsum(inv[:-1] * sample.dt)
    if stop < n:
        T[stop:] = T[stop]
    return TimeChange(times=sample.times, T=T, f_values=fv,
                      exit_index=exit_idx, truncated=truncated)


def cutoff_growth_check(M: ModelManifold, x0: float, f, checkpoints,
                        horizon: float, dt: float, n_paths: int, seed: int,
                        scheme: str = "bridge"):
    """Ensemble averages E[f^{-2}(X_{tau(s)})] at clock checkpoints.

    Returns (means, stderrs, alive_fraction); the bound to verify is
    means[j] <= e^{K_f s_j} with K_f = sup(6 |grad f|^2 - f L f) from the
    caller.  Paths that exit the cutoff's support stop contributing.
    """
    checkpoints = np.asarray(checkpoints, dtype=float)
    steps = int(round(horizon / dt))
    rng = np.random.default_rng(seed)
    stepper = _Stepper(M, dt, scheme)
    x = np.full(n_paths, float(x0))
    dL = np.zeros(n_paths)
    T = np.zeros(n_paths)
    alive = np.ones(n_paths, dtype=bool)
    done = np.zeros((checkpoints.size, n_paths), dtype=bool)
    vals = np.zeros((checkpoints.size, n_paths))
    for _ in range(steps):
        fv = np.asarray(f(x), dtype=float)
        dead = fv <= 1e-8
        alive &= ~dead
        fv = np.where(alive, fv, 1.0)
        inv = fv**-2.0
        T_next = T + np.where(alive, inv * dt, 0.0)
        for j, s in enumerate(checkpoints):
            hit = alive & ~done[j] & (T_next >= s)
            vals[j, hit] = inv[hit]
            done[j] |= hit
        T = T_next
        x = stepper(x, rng, dL)
    means, ses = [], []
    for j in range(checkpoints.size):
        sel = vals[j, done[j]]
        if sel.size < 2:
            means.append(math.nan)
            ses.append(math.nan)
        else:
            m, s = mean_and_stderr(sel)
            means.append(m)
            ses.append(s)
    return np.array(means), np.array(ses), float(np.mean(done, axis=1).min())
