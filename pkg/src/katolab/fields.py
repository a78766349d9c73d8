"""Channel grid geometry, discrete vector calculus, region masks, and norms.

Staggered (MAC) arrangement: u on vertical faces (xf_i, yc_j), v on
horizontal faces (xc_i, yf_j) with the wall rows pinned to zero, pressure at
cell centers. x is periodic and uniform; y is tanh-clustered toward the
walls at y = -1 and y = 1. Wall distance is d(y) = 1 - |y|.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

HEADER_MAGIC = "katolab-snapshot"


class GridError(ValueError):
    """Invalid grid construction or resampling request."""


class ChannelGrid:
    """Wall-resolving channel grid, periodic in x, y in [-1, 1]."""

    def __init__(self, nx: int, ny: int, lx: float = 2.0 * np.pi, stretch: float = 2.0):
        if nx < 4 or ny < 4:
            raise GridError(f"grid too small: nx={nx}, ny={ny}")
        if lx <= 0:
            raise GridError(f"period lx={lx} must be positive")
        if stretch < 0:
            raise GridError(f"stretch={stretch} must be >= 0")
        self.nx = int(nx)
        self.ny = int(ny)
        self.lx = float(lx)
        self.stretch = float(stretch)

        self.dx = self.lx / self.nx
        self.xf = self.dx * np.arange(self.nx)
        self.xc = self.xf + 0.5 * self.dx

        eta = np.linspace(-1.0, 1.0, self.ny + 1)
        if stretch == 0.0:
            yf = eta.copy()
        else:
            yf = np.tanh(stretch * eta) / np.tanh(stretch)
        yf[0], yf[-1] = -1.0, 1.0
        self.yf = yf
        self.yc = 0.5 * (yf[:-1] + yf[1:])
        self.dyc = np.diff(yf)                      # pressure/u cell heights
        dyv = np.zeros(self.ny + 1)
        dyv[1:-1] = 0.5 * (self.dyc[:-1] + self.dyc[1:])
        self.dyv = dyv                              # v control-volume heights
        self.h_uy = np.diff(self.yc)                # spacing between u rows
        self.d_c = 1.0 - np.abs(self.yc)
        self.d_f = 1.0 - np.abs(self.yf)
        self.cell_area = self.dx * self.dyc         # per y-row, uniform in x

    @property
    def wall_spacing(self) -> float:
        return float(self.dyc[0])

    def cells_in_strip(self, h: float) -> int:
        """Cell centers within distance h of one wall (minimum over walls)."""
        lower = int(np.sum(self.d_c[: self.ny // 2 + 1] <= h))
        upper = int(np.sum(self.d_c[self.ny // 2:] <= h))
        return min(lower, upper)

    def spec_dict(self) -> dict:
        return {"nx": self.nx, "ny": self.ny, "lx": self.lx, "stretch": self.stretch}

    @classmethod
    def from_spec(cls, spec: dict) -> "ChannelGrid":
        return cls(spec["nx"], spec["ny"], spec["lx"], spec["stretch"])


@dataclass
class FlowField:
    """Discrete velocity/pressure snapshot on a ChannelGrid."""

    grid: ChannelGrid
    u: np.ndarray       # (nx, ny) at (xf, yc)
    v: np.ndarray       # (nx, ny+1) at (xc, yf); wall rows are zero
    p: np.ndarray       # (nx, ny) at centers
    t: float = 0.0

    def copy(self) -> "FlowField":
        return FlowField(self.grid, self.u.copy(), self.v.copy(), self.p.copy(), self.t)


def zero_field(grid: ChannelGrid, t: float = 0.0) -> FlowField:
    return FlowField(grid, np.zeros((grid.nx, grid.ny)),
                     np.zeros((grid.nx, grid.ny + 1)),
                     np.zeros((grid.nx, grid.ny)), t)


def divergence(state: FlowField) -> np.ndarray:
    """Discrete divergence at cell centers."""
    g = state.grid
    dudx = (np.roll(state.u, -1, axis=0) - state.u) / g.dx
    dvdy = (state.v[:, 1:] - state.v[:, :-1]) / g.dyc
    return dudx + dvdy


def center_velocity(state: FlowField) -> np.ndarray:
    """Velocity interpolated to cell centers, shape (2, nx, ny)."""
    uc = 0.5 * (state.u + np.roll(state.u, -1, axis=0))
    vc = 0.5 * (state.v[:, :-1] + state.v[:, 1:])
    return np.stack([uc, vc])


# ---------------------------------------------------------------------------
# Region masks: every region is a wall-distance interval (lo, hi].
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegionMask:
    """Wall-distance band {lo < d <= hi} with per-cell quadrature weights."""

    kind: str
    lo: float
    hi: float

    def weights(self, grid: ChannelGrid) -> np.ndarray:
        """Fraction of each y-row's height lying inside the band (exact)."""
        lo, hi = self.lo, self.hi
        yfl, yfh = grid.yf[:-1], grid.yf[1:]
        # lower half: d = 1 + y for y < 0  ->  y in (lo - 1, hi - 1]
        lo_len = np.maximum(
            0.0, np.minimum(yfh, np.minimum(hi - 1.0, 0.0)) - np.maximum(yfl, lo - 1.0)
        )
        # upper half: d = 1 - y for y > 0  ->  y in [1 - hi, 1 - lo)
        hi_len = np.maximum(
            0.0, np.minimum(yfh, 1.0 - lo) - np.maximum(yfl, np.maximum(1.0 - hi, 0.0))
        )
        return (lo_len + hi_len) / grid.dyc

    def center_mask(self, grid: ChannelGrid) -> np.ndarray:
        """Boolean mask of cell centers inside the band (used for sup norms)."""
        return (grid.d_c > self.lo) & (grid.d_c <= self.hi)

    def measure(self, grid: ChannelGrid) -> float:
        lo = max(self.lo, 0.0)
        hi = min(self.hi, 1.0)
        return 2.0 * grid.lx * max(hi - lo, 0.0)


def full_channel() -> RegionMask:
    return RegionMask("full", 0.0, 1.0)


def inner_set(h: float) -> RegionMask:
    """Points farther than h from the walls."""
    return RegionMask("inner", h, 1.0)


def boundary_strip(h: float) -> RegionMask:
    """Points within distance h of a wall."""
    return RegionMask("strip", 0.0, h)


def layer_mask(layers, n: int) -> RegionMask:
    lo, hi = layers.intervals[n - 1]
    return RegionMask(f"layer{n}", lo, hi)


def overlap_mask(layers, n: int) -> RegionMask:
    lo, hi = layers.overlap_intervals[n - 1]
    return RegionMask(f"overlap{n}", lo, hi)


def _magnitude(field: np.ndarray) -> np.ndarray:
    field = np.asarray(field)
    if field.ndim == 3:
        return np.sqrt(np.sum(field * field, axis=0))
    return np.abs(field)


def lp_norm(field: np.ndarray, p: float, grid: ChannelGrid, region: RegionMask) -> float:
    """Weighted L^p norm over a region; p = inf is a masked center maximum."""
    if p != np.inf and p < 1:
        raise ValueError(f"p={p} must be >= 1")
    mag = _magnitude(field)
    if p == np.inf:
        m = region.center_mask(grid)
        if not m.any():
            return 0.0
        return float(np.max(mag[:, m]))
    w = region.weights(grid) * grid.cell_area
    return float(np.sum(mag ** p * w) ** (1.0 / p))


def masked_integral(values: np.ndarray, grid: ChannelGrid, region: RegionMask) -> float:
    """Integral of a cell-centered density over a region."""
    w = region.weights(grid) * grid.cell_area
    return float(np.sum(values * w))


# ---------------------------------------------------------------------------
# Derivatives on the stretched grid
# ---------------------------------------------------------------------------

def _nonuniform_ddy(values: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Second-order d/dy along the last axis on a non-uniform grid.

    Three-point Lagrange stencils; one-sided at both ends.
    """
    out = np.empty_like(values)
    hl = y[1:-1] - y[:-2]
    hr = y[2:] - y[1:-1]
    a = -hr / (hl * (hl + hr))
    b = (hr - hl) / (hl * hr)
    c = hl / (hr * (hl + hr))
    out[..., 1:-1] = (a * values[..., :-2] + b * values[..., 1:-1]
                      + c * values[..., 2:])
    h0, h1 = y[1] - y[0], y[2] - y[1]
    out[..., 0] = (-(2 * h0 + h1) / (h0 * (h0 + h1)) * values[..., 0]
                   + (h0 + h1) / (h0 * h1) * values[..., 1]
                   - h0 / (h1 * (h0 + h1)) * values[..., 2])
    hm, hn = y[-2] - y[-3], y[-1] - y[-2]
    out[..., -1] = ((2 * hn + hm) / (hn * (hn + hm)) * values[..., -1]
                    - (hn + hm) / (hn * hm) * values[..., -2]
                    + hn / (hm * (hn + hm)) * values[..., -3])
    return out


def scalar_gradient(values: np.ndarray, grid: ChannelGrid) -> np.ndarray:
    """(d/dx, d/dy) of a cell-centered scalar, centered in x, one-sided at walls."""
    ddx = (np.roll(values, -1, axis=0) - np.roll(values, 1, axis=0)) / (2 * grid.dx)
    ddy = _nonuniform_ddy(values, grid.yc)
    return np.stack([ddx, ddy])


def gradient(state: FlowField) -> np.ndarray:
    """Velocity gradient tensor at cell centers, shape (2, 2, nx, ny).

    Index [i, j] is d u_i / d x_j. Face differences give du/dx and dv/dy
    exactly at centers; the cross derivatives use centered stencils with
    one-sided closures at the walls.
    """
    g = state.grid
    uc = 0.5 * (state.u + np.roll(state.u, -1, axis=0))
    vc = 0.5 * (state.v[:, :-1] + state.v[:, 1:])
    dudx = (np.roll(state.u, -1, axis=0) - state.u) / g.dx
    dvdy = (state.v[:, 1:] - state.v[:, :-1]) / g.dyc
    dudy = _nonuniform_ddy(uc, g.yc)
    dvdx = (np.roll(vc, -1, axis=0) - np.roll(vc, 1, axis=0)) / (2 * g.dx)
    return np.stack([np.stack([dudx, dudy]), np.stack([dvdx, dvdy])])


def dissipation_density(state: FlowField) -> np.ndarray:
    """Cell-centered density of the discrete |grad u|^2 quadratic form.

    The weighted sum over all cells reproduces exactly the quadratic form
    used by the solver's energy ledger (flux-form differences, one-sided
    wall closures for u, natural zero rows for v).
    """
    g = state.grid
    u, v = state.u, state.v
    area = g.cell_area  # (ny,)
    dens = np.zeros((g.nx, g.ny))

    # (du/dx)^2 at centers
    dens += ((np.roll(u, -1, axis=0) - u) / g.dx) ** 2
    # (dv/dy)^2 at centers
    dens += ((v[:, 1:] - v[:, :-1]) / g.dyc) ** 2

    # (du/dy)^2 at interior corners (xf_i, yf_j), j = 1..ny-1
    du = (u[:, 1:] - u[:, :-1]) / g.h_uy       # (nx, ny-1)
    term = du ** 2 * (g.dx * g.h_uy)           # full contribution per corner
    quarter = 0.25 * term
    for roll_x in (0, 1):
        shifted = np.roll(quarter, -roll_x, axis=0)   # split to cells i-1, i
        dens[:, :-1] += shifted / area[:-1]
        dens[:, 1:] += shifted / area[1:]
    # wall shear contributions for u (one-sided to the wall value 0)
    h_lo = g.yc[0] + 1.0
    h_hi = 1.0 - g.yc[-1]
    wall_lo = (u[:, 0] / h_lo) ** 2 * (g.dx * h_lo)
    wall_hi = (u[:, -1] / h_hi) ** 2 * (g.dx * h_hi)
    for roll_x in (0, 1):
        dens[:, 0] += 0.5 * np.roll(wall_lo, -roll_x) / area[0]
        dens[:, -1] += 0.5 * np.roll(wall_hi, -roll_x) / area[-1]

    # (dv/dx)^2 at corners (xf_{i+1}, yf_j), j = 1..ny-1
    dv = (np.roll(v[:, 1:-1], -1, axis=0) - v[:, 1:-1]) / g.dx   # (nx, ny-1)
    term = dv ** 2 * (g.dx * g.dyv[1:-1])
    quarter = 0.25 * term
    for roll_x in (0, 1):
        shifted = np.roll(quarter, roll_x, axis=0)    # split to cells i, i+1
        dens[:, :-1] += shifted / area[:-1]
        dens[:, 1:] += shifted / area[1:]
    return dens


def dissipation_rate(state: FlowField) -> float:
    """Discrete ||grad u||^2 over the whole channel (no viscosity factor)."""
    g = state.grid
    return float(np.sum(dissipation_density(state) * g.cell_area))


# ---------------------------------------------------------------------------
# Besov norms via finite differences over a shift ladder
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShiftSet:
    """Finite collection of (sx, sy) shifts approximating the sup over shifts."""

    shifts: tuple

    def to_list(self) -> list:
        return [list(s) for s in self.shifts]


def default_shift_set(grid: ChannelGrid, delta: float, y_cap: float = 0.25) -> ShiftSet:
    """Dyadic ladder of axis shifts plus diagonal combinations.

    x-shifts run over grid multiples dx, 2dx, ... up to lx/8; y-shifts over
    delta, 2delta, ... up to y_cap; each y-shift is also paired with the
    closest admissible x-shift.
    """
    xs = []
    s = grid.dx
    while s <= grid.lx / 8.0 + 1e-12:
        xs.append(s)
        s *= 2.0
    ys = []
    s = delta
    while s <= y_cap + 1e-12:
        ys.append(s)
        s *= 2.0
    shifts = [(x, 0.0) for x in xs] + [(0.0, y) for y in ys]
    for y in ys:
        m = max(1, round(y / grid.dx))
        x = m * grid.dx
        if x <= grid.lx / 8.0 + 1e-12:
            shifts.append((x, y))
    return ShiftSet(tuple(shifts))


def _shifted_values(field: np.ndarray, grid: ChannelGrid, sx: float, sy: float):
    """f evaluated at (x + sx, y + sy); returns (values, valid y-mask)."""
    m = int(round(sx / grid.dx))
    if abs(m * grid.dx - sx) > 1e-9 * grid.dx and sx != 0.0:
        raise ValueError(f"x-shift {sx} is not a multiple of dx={grid.dx}")
    shifted = np.roll(field, -m, axis=-2) if m else field
    if sy == 0.0:
        return shifted, np.ones(grid.ny, dtype=bool)
    target = grid.yc + sy
    valid = (target >= grid.yc[0]) & (target <= grid.yc[-1])
    spline = CubicSpline(grid.yc, shifted, axis=-1)
    vals = spline(target)
    return vals, valid


def besov_norm(field: np.ndarray, alpha: float, p: float, grid: ChannelGrid,
               region: RegionMask, shifts: ShiftSet) -> float:
    """L^p norm plus the finite-difference seminorm sup_s ||f(.+s)-f||_p / |s|^alpha."""
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha={alpha} outside (0, 1)")
    if not shifts.shifts:
        raise ValueError("empty shift set")
    base = lp_norm(field, p, grid, region)
    semi = 0.0
    w_base = region.weights(grid) * grid.cell_area
    for sx, sy in shifts.shifts:
        vals, valid = _shifted_values(field, grid, sx, sy)
        diff = _magnitude(vals - np.asarray(field))
        w = np.where(valid, w_base, 0.0)
        if p == np.inf:
            m = region.center_mask(grid) & valid
            dn = float(np.max(diff[:, m])) if m.any() else 0.0
        else:
            dn = float(np.sum(diff ** p * w) ** (1.0 / p))
        semi = max(semi, dn / np.hypot(sx, sy) ** alpha)
    return base + semi


# ---------------------------------------------------------------------------
# Uniform diagnostic lattices and resampling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UniformPatch:
    """Node lattice uniform in both directions; x periodic with period lx."""

    nx: int
    hx: float
    ny: int
    hy: float
    y0: float

    @property
    def xs(self) -> np.ndarray:
        return self.hx * np.arange(self.nx)

    @property
    def ys(self) -> np.ndarray:
        return self.y0 + self.hy * np.arange(self.ny)

    @property
    def d(self) -> np.ndarray:
        return 1.0 - np.abs(self.ys)

    @property
    def node_area(self) -> float:
        return self.hx * self.hy


def channel_patch(grid: ChannelGrid, spacing: float) -> UniformPatch:
    """Uniform full-channel lattice with wall nodes at y = -1 and y = 1."""
    ny = int(np.ceil(2.0 / spacing)) + 1
    hy = 2.0 / (ny - 1)
    return UniformPatch(nx=grid.nx, hx=grid.dx, ny=ny, hy=hy, y0=-1.0)


def resample_to_patch(values: np.ndarray, grid: ChannelGrid, patch: UniformPatch,
                      wall_zero: bool = False) -> np.ndarray:
    """Cubic interpolation of a cell-centered field onto a uniform patch.

    Fields known to vanish at the walls are anchored there so the zeros are
    reproduced exactly. patch.nx must match the source grid.
    """
    if patch.nx != grid.nx:
        raise GridError("patch nx must match the grid (x stays on solver columns)")
    if wall_zero:
        y = np.concatenate([[-1.0], grid.yc, [1.0]])
        data = np.concatenate(
            [np.zeros((grid.nx, 1)), values, np.zeros((grid.nx, 1))], axis=1)
    else:
        y = grid.yc
        data = values
    spline = CubicSpline(y, data, axis=1)
    ys = np.clip(patch.ys, y[0], y[-1])
    return spline(ys)


@dataclass(frozen=True)
class NearWallSamples:
    """Field samples on uniform wall-distance nodes d = k * spacing, per wall."""

    spacing: float
    d_nodes: np.ndarray
    lower: np.ndarray   # (nx, K) values at y = -1 + d
    upper: np.ndarray   # (nx, K) values at y = 1 - d


def resample_near_wall(values: np.ndarray, grid: ChannelGrid, spacing: float,
                       height: float, nu: float | None = None,
                       wall_zero: bool = True) -> NearWallSamples:
    """Uniform near-wall resampling of a cell-centered field.

    With nu given, enforces the diagnostic rule spacing <= nu / 4 inside the
    strip of height 8 nu. Rejects spacings coarser than the source grid near
    the wall.
    """
    if spacing <= 0 or height <= 0:
        raise GridError("spacing and height must be positive")
    if nu is not None and height <= 8.0 * nu and spacing > nu / 4.0 + 1e-15:
        raise GridError(f"target spacing {spacing} exceeds nu/4 = {nu / 4.0}")
    if spacing > grid.wall_spacing + 1e-15:
        raise GridError(
            f"target spacing {spacing} coarser than source wall spacing "
            f"{grid.wall_spacing}")
    k = int(np.floor(height / spacing + 1e-12))
    d = spacing * np.arange(k + 1)
    if wall_zero:
        y = np.concatenate([[-1.0], grid.yc, [1.0]])
        data = np.concatenate(
            [np.zeros((grid.nx, 1)), values, np.zeros((grid.nx, 1))], axis=1)
    else:
        y = grid.yc
        data = values
    spline = CubicSpline(y, data, axis=1)
    lower = spline(np.clip(-1.0 + d, y[0], y[-1]))
    upper = spline(np.clip(1.0 - d, y[0], y[-1]))
    if wall_zero:
        lower[:, 0] = 0.0
        upper[:, 0] = 0.0
    return NearWallSamples(spacing=spacing, d_nodes=d, lower=lower, upper=upper)


def trig_resample_x(values: np.ndarray, nx_new: int) -> np.ndarray:
    """Exact trigonometric resampling along the periodic x axis (axis 0)."""
    nx = values.shape[0]
    if nx_new == nx:
        return values.copy()
    spec = np.fft.rfft(values, axis=0)
    n_keep = min(nx, nx_new) // 2 + 1
    new_spec = np.zeros((nx_new // 2 + 1,) + values.shape[1:], dtype=complex)
    new_spec[:n_keep] = spec[:n_keep]
    if nx_new > nx and nx % 2 == 0:
        new_spec[nx // 2] *= 0.5   # source Nyquist becomes a paired mode
    if nx_new < nx and nx_new % 2 == 0:
        new_spec[-1] = new_spec[-1].real  # fold the Nyquist mode
    return np.fft.irfft(new_spec, n=nx_new, axis=0) * (nx_new / nx)


def resample_field_to_grid(values: np.ndarray, src: ChannelGrid, dst: ChannelGrid,
                           wall_zero: bool = False) -> np.ndarray:
    """Move a cell-centered field between channel grids (trig in x, cubic in y)."""
    if abs(src.lx - dst.lx) > 1e-12:
        raise GridError("grids have different periods")
    vals = trig_resample_x(values, dst.nx)
    if wall_zero:
        y = np.concatenate([[-1.0], src.yc, [1.0]])
        data = np.concatenate(
            [np.zeros((dst.nx, 1)), vals, np.zeros((dst.nx, 1))], axis=1)
    else:
        y, data = src.yc, vals
    spline = CubicSpline(y, data, axis=1)
    return spline(np.clip(dst.yc, y[0], y[-1]))


# ---------------------------------------------------------------------------
# Calculus and quadrature on uniform patches
# ---------------------------------------------------------------------------

def patch_ddx(values: np.ndarray, patch: UniformPatch) -> np.ndarray:
    """Centered periodic d/dx on a patch (x is axis -2)."""
    return (np.roll(values, -1, axis=-2) - np.roll(values, 1, axis=-2)) / (2 * patch.hx)


def patch_ddy(values: np.ndarray, patch: UniformPatch) -> np.ndarray:
    """Centered d/dy on a patch; one-sided at the first/last rows."""
    out = np.empty_like(values)
    out[..., 1:-1] = (values[..., 2:] - values[..., :-2]) / (2 * patch.hy)
    out[..., 0] = (values[..., 1] - values[..., 0]) / patch.hy
    out[..., -1] = (values[..., -1] - values[..., -2]) / patch.hy
    return out


def patch_laplacian(values: np.ndarray, patch: UniformPatch) -> np.ndarray:
    """Wide Laplacian D(D .) so discrete integration by parts is exact.

    Valid two rows away from the patch edges; used only where the cutoff
    weights vanish near the edges, which keeps the parts formula exact.
    """
    return (patch_ddx(patch_ddx(values, patch), patch)
            + patch_ddy(patch_ddy(values, patch), patch))


def patch_lp_norm(values: np.ndarray, p: float, patch: UniformPatch,
                  row_mask: np.ndarray | None = None) -> float:
    """L^p norm over patch nodes, optionally restricted to a row mask."""
    mag = _magnitude(values)
    if row_mask is not None:
        mag = mag[..., row_mask]
    if mag.size == 0:
        return 0.0
    if p == np.inf:
        return float(np.max(mag))
    return float((np.sum(mag ** p) * patch.node_area) ** (1.0 / p))


def patch_integral(values: np.ndarray, patch: UniformPatch) -> float:
    return float(np.sum(values) * patch.node_area)


# ---------------------------------------------------------------------------
# Snapshot persistence: JSON header + little-endian float64 payload
# ---------------------------------------------------------------------------

def save_snapshot(path, state: FlowField, nu: float) -> None:
    header = {
        "magic": HEADER_MAGIC,
        "version": 1,
        "grid": state.grid.spec_dict(),
        "t": state.t,
        "nu": nu,
        "fields": ["u", "v", "p"],
        "shapes": [list(state.u.shape), list(state.v.shape), list(state.p.shape)],
        "dtype": "<f8",
    }
    blob = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        for arr in (state.u, state.v, state.p):
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_snapshot(path):
    """Read one snapshot; returns (FlowField, nu)."""
    with open(path, "rb") as fh:
        (hlen,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(hlen).decode())
        if header.get("magic") != HEADER_MAGIC:
            raise IOError(f"{path}: not a snapshot file")
        grid = ChannelGrid.from_spec(header["grid"])
        arrays = []
        for shape in header["shapes"]:
            count = int(np.prod(shape))
            data = np.frombuffer(fh.read(8 * count), dtype="<f8").reshape(shape)
            arrays.append(data.astype(float))
    state = FlowField(grid, arrays[0], arrays[1], arrays[2], header["t"])
    return state, header["nu"]
