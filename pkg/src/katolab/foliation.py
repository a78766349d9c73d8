"""Near-wall exponent schedules, layer decomposition, partition of unity, cutoff.

Everything here is a function of scalar wall distance d = 1 - |y| (channel
half-height 1), which keeps the construction independent of the streamwise
direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

KATO = "kato"
SMOOTH = "smooth"

# Exponent gap factor: each beta_n must sit strictly below
# (1 + beta_{n-1}/3) / (2 (1 - alpha)).
MAX_BETA_ITERS = 200_000


class ScheduleError(ValueError):
    """Invalid regularity exponent or layer-exponent request."""


class LayerOrderingError(ValueError):
    """Viscosity too large for the layer intervals to be ordered."""


def gap_bound(alpha: float, beta_prev: float) -> float:
    """Strict upper bound for the next exponent given the previous one."""
    return (1.0 + beta_prev / 3.0) / (2.0 * (1.0 - alpha))


def beta_star_limit(alpha: float) -> float:
    """Fixed point of the reference recursion, 3 / (5 - 6 alpha)."""
    return 3.0 / (5.0 - 6.0 * alpha)


def beta_star_sequence(alpha: float, count: int) -> np.ndarray:
    """First `count` entries (beta*_1 .. beta*_count) of the reference recursion."""
    out = np.empty(count)
    b = 0.0
    for n in range(count):
        b = gap_bound(alpha, b)
        out[n] = b
    return out


@dataclass(frozen=True)
class BetaSchedule:
    """Ordered exponents beta_0..beta_N controlling layer widths nu^beta_n."""

    alpha: float
    mode: str
    betas: tuple
    a: float | None = None
    degraded: bool = False

    @property
    def n_layers(self) -> int:
        return len(self.betas) - 1

    @property
    def beta_final(self) -> float:
        return self.betas[-1]

    def validate(self) -> None:
        """Raise ScheduleError unless every schedule invariant holds."""
        b = self.betas
        if b[0] != 0.0:
            raise ScheduleError("beta_0 must be 0")
        if any(not (b[i] < b[i + 1]) for i in range(len(b) - 1)):
            raise ScheduleError(f"exponents not strictly increasing: {b}")
        for n in range(1, len(b)):
            bound = gap_bound(self.alpha, b[n - 1])
            if not b[n] < bound:
                raise ScheduleError(
                    f"gap condition violated at n={n}: "
                    f"beta_{n}={b[n]:.12g} >= bound {bound:.12g}"
                )
        n_ = self.n_layers
        if n_ >= 2 and not b[n_ - 1] <= 1.0:
            raise ScheduleError(f"beta_{n_-1}={b[n_-1]} exceeds 1")
        if self.mode == KATO:
            if b[-1] != 1.0:
                raise ScheduleError("final exponent must be exactly 1 in kato mode")
        else:
            if self.a is None or b[-1] != self.a:
                raise ScheduleError("final exponent must equal layer exponent a")

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "mode": self.mode,
            "a": self.a,
            "betas": list(self.betas),
            "n_layers": self.n_layers,
            "degraded": self.degraded,
        }


def validate_layer_exponent(alpha: float, a: float) -> None:
    """Check the smoother-solution layer exponent admissibility bound."""
    if not (isinstance(a, (int, float)) and math.isfinite(a)):
        raise ScheduleError(f"layer exponent a={a!r} is not a finite number")
    if not a > 1.0:
        raise ScheduleError(f"layer exponent a={a} must exceed 1")
    if alpha < 5.0 / 6.0:
        limit = beta_star_limit(alpha)
        if not a < limit:
            raise ScheduleError(
                f"layer exponent admissibility violated: a={a} must be < "
                f"3/(5-6*alpha)={limit:.6g} for alpha={alpha}"
            )


def _check_alpha(alpha: float) -> None:
    if not (isinstance(alpha, (int, float)) and math.isfinite(alpha)):
        raise ScheduleError(f"alpha={alpha!r} is not a finite number")
    if not (1.0 / 3.0 < alpha < 1.0):
        raise ScheduleError(f"alpha={alpha} outside (1/3, 1)")


def build_beta_schedule(alpha: float, mode: str = KATO, a: float | None = None) -> BetaSchedule:
    """Construct an admissible exponent schedule for the given regularity.

    The reference recursion fixes the layer count N; the returned exponents
    are the reference values scaled by target/beta*_N so the gap condition
    holds strictly with margin and the schedule ends exactly at the target
    (1, or the layer exponent a).
    """
    _check_alpha(alpha)
    if mode not in (KATO, SMOOTH):
        raise ScheduleError(f"unknown mode {mode!r}")
    if mode == SMOOTH:
        if a is None:
            raise ScheduleError("smooth mode requires a layer exponent a")
        validate_layer_exponent(alpha, a)
        target = float(a)
    else:
        if a is not None:
            raise ScheduleError("layer exponent a only applies in smooth mode")
        target = 1.0

    stars = [0.0]
    while stars[-1] <= target:
        stars.append(gap_bound(alpha, stars[-1]))
        if len(stars) > MAX_BETA_ITERS:
            raise ScheduleError(
                f"reference recursion did not exceed target {target} "
                f"(alpha={alpha}); layer exponent too close to its limit"
            )
    n = len(stars) - 1  # first index with beta* > target
    lam = target / stars[n]
    betas = [0.0] + [lam * stars[k] for k in range(1, n)] + [target]

    if mode == SMOOTH:
        # Interior exponents stay <= 1; raise any entry whose successor would
        # violate the gap condition, then re-verify everything.
        for k in range(1, n):
            betas[k] = min(betas[k], 1.0)
        for k in range(n - 1, 0, -1):
            lo = 3.0 * (2.0 * (1.0 - alpha) * betas[k + 1] - 1.0)
            hi = 1.0 if k == n - 1 else betas[k + 1]
            if lo >= hi:
                raise ScheduleError(
                    f"cannot place exponent {k}: need beta in ({lo:.6g}, {hi:.6g}) "
                    f"for a={a}, alpha={alpha}"
                )
            if betas[k] <= lo:
                betas[k] = lo + 0.1 * (hi - lo)

    sched = BetaSchedule(alpha=float(alpha), mode=mode, betas=tuple(betas),
                         a=(float(a) if mode == SMOOTH else None))
    sched.validate()
    return sched


@dataclass(frozen=True)
class LayerDecomposition:
    """Wall-distance intervals (lo, hi] for layers V_1..V_{N+1} and overlaps."""

    schedule: BetaSchedule
    nu: float
    intervals: tuple            # N+1 pairs, outermost first
    overlap_intervals: tuple    # N-1 pairs, V_n cap V_{n+1}

    @property
    def n_layers(self) -> int:
        return len(self.intervals) - 1

    def layer_of_distance(self, d: np.ndarray) -> np.ndarray:
        """1-based index of the innermost layer containing each distance.

        Points in an overlap V_n cap V_{n+1} report n+1, matching the
        mollification width that applies there.
        """
        d = np.asarray(d)
        idx = np.full(d.shape, len(self.intervals), dtype=int)
        for k, (lo, hi) in enumerate(self.intervals, start=1):
            inside = (d > lo) & (d <= hi)
            idx = np.where(inside, k, idx)
        return idx

    def measure(self, lo: float, hi: float, lx: float) -> float:
        """Area of {lo < d <= hi} in a channel of period lx."""
        lo_c = max(lo, 0.0)
        hi_c = min(hi, 1.0)
        return 2.0 * lx * max(hi_c - lo_c, 0.0)

    def to_dict(self) -> dict:
        return {
            "nu": self.nu,
            "intervals": [list(p) for p in self.intervals],
            "overlap_intervals": [list(p) for p in self.overlap_intervals],
        }


def build_layers(schedule: BetaSchedule, nu: float) -> LayerDecomposition:
    """Slice the channel into wall-distance layers for one viscosity."""
    if not (0.0 < nu < 1.0):
        raise LayerOrderingError(f"viscosity nu={nu} outside (0, 1)")
    betas = schedule.betas
    n = schedule.n_layers
    edge = [2.0 * nu ** betas[k] for k in range(n + 1)]  # edge[0]=2, edge[k]=2 nu^beta_k

    if edge[1] >= 1.0:
        raise LayerOrderingError(
            f"outer layer edge 2*nu^beta_1={edge[1]:.6g} does not fit the half-channel"
        )
    # Adjacent-only overlap needs edge[k+1] + edge[k+2] <= edge[k].
    for k in range(1, n - 1):
        if edge[k + 1] + edge[k + 2] > edge[k]:
            raise LayerOrderingError(
                f"layers {k} and {k+2} would overlap at nu={nu}: "
                f"2nu^b{k+1}+2nu^b{k+2}={edge[k+1]+edge[k+2]:.6g} > 2nu^b{k}={edge[k]:.6g}"
            )

    intervals = [(edge[1], 1.0)]
    for k in range(2, n + 1):
        intervals.append((edge[k], edge[k - 1] + edge[k]))
    intervals.append((0.0, edge[n]))

    overlaps = []
    for k in range(1, n):
        overlaps.append((edge[k], edge[k] + edge[k + 1]))

    return LayerDecomposition(schedule=schedule, nu=float(nu),
                              intervals=tuple(intervals),
                              overlap_intervals=tuple(overlaps))


def smoothstep(t: np.ndarray) -> np.ndarray:
    """C1 cubic ramp 3t^2 - 2t^3 clamped to [0, 1]."""
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def smoothstep_deriv(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    inside = (t > 0.0) & (t < 1.0)
    return np.where(inside, 6.0 * t * (1.0 - t), 0.0)


@dataclass(frozen=True)
class CutoffTheta:
    """Near-wall cutoff: 0 inside d <= lo, 1 outside d >= hi, cubic ramp between."""

    lo: float
    hi: float

    def __call__(self, d: np.ndarray) -> np.ndarray:
        return smoothstep((np.asarray(d, dtype=float) - self.lo) / (self.hi - self.lo))

    def deriv(self, d: np.ndarray) -> np.ndarray:
        w = self.hi - self.lo
        return smoothstep_deriv((np.asarray(d, dtype=float) - self.lo) / w) / w

    @property
    def max_slope(self) -> float:
        return 1.5 / (self.hi - self.lo)

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi}


def build_cutoff_theta(nu: float, mode: str = KATO, a: float | None = None) -> CutoffTheta:
    """Cutoff vanishing on the viscous strip: ramp on [2nu, 4nu] (or [nu^a, 2nu^a])."""
    if not (0.0 < nu < 1.0):
        raise ValueError(f"viscosity nu={nu} outside (0, 1)")
    if mode == KATO:
        theta = CutoffTheta(lo=2.0 * nu, hi=4.0 * nu)
        assert theta.max_slope <= 4.0 / nu
    elif mode == SMOOTH:
        if a is None:
            raise ValueError("smooth mode requires layer exponent a")
        w = nu ** a
        theta = CutoffTheta(lo=w, hi=2.0 * w)
        assert theta.max_slope <= 2.0 / w
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return theta


@dataclass(frozen=True)
class PartitionOfUnity:
    """C1 gluing functions xi_1..xi_N subordinate to the layer decomposition."""

    layers: LayerDecomposition

    @property
    def n(self) -> int:
        return self.layers.n_layers

    def _ramps(self, k: int):
        """Rising ramp at the inner support edge, falling ramp at the outer one."""
        overlaps = self.layers.overlap_intervals
        rise = overlaps[k - 1] if k <= len(overlaps) else None       # V_k cap V_{k+1}
        fall = overlaps[k - 2] if k >= 2 else None                   # V_{k-1} cap V_k
        return rise, fall

    def xi(self, k: int, d: np.ndarray) -> np.ndarray:
        """Evaluate xi_k on wall distances d (vectorized)."""
        if not 1 <= k <= self.n:
            raise IndexError(f"xi index {k} outside 1..{self.n}")
        d = np.asarray(d, dtype=float)
        lo, hi = self.layers.intervals[k - 1]
        rise, fall = self._ramps(k)
        val = np.where((d > lo) & (d <= hi), 1.0, 0.0)
        if rise is not None:
            rlo, rhi = rise
            on = (d > rlo) & (d <= rhi)
            val = np.where(on, smoothstep((d - rlo) / (rhi - rlo)), val)
        if fall is not None:
            flo, fhi = fall
            on = (d > flo) & (d <= fhi)
            val = np.where(on, 1.0 - smoothstep((d - flo) / (fhi - flo)), val)
        return val

    def xi_deriv(self, k: int, d: np.ndarray) -> np.ndarray:
        """d xi_k / dd, nonzero only on the two overlap ramps."""
        d = np.asarray(d, dtype=float)
        rise, fall = self._ramps(k)
        out = np.zeros_like(d)
        if rise is not None:
            rlo, rhi = rise
            w = rhi - rlo
            on = (d > rlo) & (d <= rhi)
            out = np.where(on, smoothstep_deriv((d - rlo) / w) / w, out)
        if fall is not None:
            flo, fhi = fall
            w = fhi - flo
            on = (d > flo) & (d <= fhi)
            out = np.where(on, -smoothstep_deriv((d - flo) / w) / w, out)
        return out

    def xi_sum(self, d: np.ndarray) -> np.ndarray:
        d = np.asarray(d, dtype=float)
        total = np.zeros_like(d)
        for k in range(1, self.n + 1):
            total = total + self.xi(k, d)
        return total


def build_partition(layers: LayerDecomposition) -> PartitionOfUnity:
    """Partition of unity with cubic ramps across each layer overlap."""
    return PartitionOfUnity(layers=layers)
