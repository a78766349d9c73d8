"""Mollification kernels, multi-scale layer smoothing, and the commutator.

Kernels are the standard radial bump exp(-1/(1 - |z/eps|^2)) truncated at
|z| = eps, sampled on the uniform diagnostic lattice and renormalized to
unit discrete mass. Convolutions wrap periodically in x and never wrap in
y; results are valid only where the whole kernel support fits inside the
data, which on full-channel patches is exactly the region of wall distance
greater than eps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import UniformPatch
from .foliation import BetaSchedule, LayerDecomposition


class MollifyError(ValueError):
    """Kernel construction or evaluation-domain failure."""


@dataclass(frozen=True)
class MollifierKernel:
    """Radial bump of width eps discretized on a (hx, hy) lattice."""

    epsilon: float
    hx: float
    hy: float
    weights: np.ndarray     # (2 mx + 1, 2 my + 1), unit sum
    mx: int
    my: int

    def second_moment(self) -> np.ndarray:
        """Discrete second-moment tensor sum w(z) z (x) z."""
        zx = self.hx * np.arange(-self.mx, self.mx + 1)
        zy = self.hy * np.arange(-self.my, self.my + 1)
        zx2 = np.sum(self.weights * zx[:, None] ** 2)
        zy2 = np.sum(self.weights * zy[None, :] ** 2)
        zxy = np.sum(self.weights * zx[:, None] * zy[None, :])
        return np.array([[zx2, zxy], [zxy, zy2]])


def make_kernel(epsilon: float, hx: float, hy: float) -> MollifierKernel:
    """Discrete unit-mass bump supported strictly inside radius epsilon."""
    if epsilon <= 0:
        raise MollifyError(f"kernel width {epsilon} must be positive")
    mx = int(np.floor(epsilon / hx - 1e-12)) if hx < epsilon else 0
    my = int(np.floor(epsilon / hy - 1e-12)) if hy < epsilon else 0
    zx = hx * np.arange(-mx, mx + 1)
    zy = hy * np.arange(-my, my + 1)
    r2 = (zx[:, None] / epsilon) ** 2 + (zy[None, :] / epsilon) ** 2
    w = np.zeros_like(r2)
    inside = r2 < 1.0
    w[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    total = w.sum()
    if total <= 0:
        raise MollifyError(f"kernel of width {epsilon} has no lattice support")
    return MollifierKernel(epsilon=float(epsilon), hx=float(hx), hy=float(hy),
                           weights=w / total, mx=mx, my=my)


def convolve(values: np.ndarray, kernel: MollifierKernel,
             patch: UniformPatch) -> np.ndarray:
    """Discrete convolution, circular in x, zero-extended in y.

    Rows within kernel.my of the patch edges are contaminated by the zero
    extension and must be masked by the caller (valid_rows does this).
    """
    if values.shape[-2:] != (patch.nx, patch.ny):
        raise MollifyError("field shape does not match patch")
    if abs(kernel.hx - patch.hx) > 1e-12 or abs(kernel.hy - patch.hy) > 1e-12:
        raise MollifyError("kernel lattice does not match patch")
    my = kernel.my
    ny_pad = patch.ny + 2 * my
    # kernel offsets wrap in x (np.add.at accumulates if wider than the domain)
    kern = np.zeros((patch.nx, ny_pad))
    ix = np.arange(-kernel.mx, kernel.mx + 1) % patch.nx
    iy = np.arange(2 * my + 1)
    np.add.at(kern, (ix[:, None], iy[None, :]), kernel.weights)
    padded = np.zeros(values.shape[:-2] + (patch.nx, ny_pad))
    padded[..., :, my:my + patch.ny] = values
    spec = np.fft.rfft2(padded, axes=(-2, -1))
    kspec = np.fft.rfft2(kern, axes=(-2, -1))
    conv = np.fft.irfft2(spec * kspec, s=(patch.nx, ny_pad), axes=(-2, -1))
    # kernel rows live at [0, 2 my]: field row j appears at padded row j + 2 my
    return conv[..., :, 2 * my: 2 * my + patch.ny]


def valid_rows(kernel: MollifierKernel, patch: UniformPatch) -> np.ndarray:
    """Rows where the convolution is uncontaminated and d > eps holds."""
    j = np.arange(patch.ny)
    margin = (j >= kernel.my) & (j <= patch.ny - 1 - kernel.my)
    return margin & (patch.d > kernel.epsilon)


def mollify(values: np.ndarray, kernel: MollifierKernel, patch: UniformPatch,
            require_rows: np.ndarray | None = None) -> np.ndarray:
    """Mollified field on the patch; rejects evaluation requests inside Gamma_eps."""
    ok = valid_rows(kernel, patch)
    if require_rows is not None and not ok[require_rows].all():
        bad = np.where(require_rows & ~ok)[0]
        raise MollifyError(
            f"mollification of width {kernel.epsilon} undefined at rows {bad[:5]} "
            f"(wall distance <= width)")
    return convolve(values, kernel, patch)


def mollify_error(values: np.ndarray, kernel: MollifierKernel, patch: UniformPatch,
                  p: float, row_mask: np.ndarray) -> float:
    """||mollified - original||_p over rows inside the valid region."""
    from .fields import patch_lp_norm
    ok = valid_rows(kernel, patch)
    if not ok[row_mask].all():
        raise MollifyError("error region extends into Gamma_eps")
    diff = convolve(values, kernel, patch) - values
    return patch_lp_norm(diff, p, patch, row_mask)


def commutator(f: np.ndarray, g: np.ndarray, kernel: MollifierKernel,
               patch: UniformPatch) -> np.ndarray:
    """Mollified-product defect bar(f g) - bar(f) bar(g), stable three-term form.

    Scalars give a scalar field; a pair of vector fields gives the full
    tensor with components [i, j] = bar(f_i g_j) - bar(f_i) bar(g_j).
    """
    f = np.asarray(f)
    g = np.asarray(g)

    def scalar_comm(a, b):
        conv_ab = convolve(a * b, kernel, patch)
        conv_a = convolve(a, kernel, patch)
        conv_b = convolve(b, kernel, patch)
        # integral of eta * (delta f)(delta g) minus product of the averages
        first = conv_ab - a * conv_b - b * conv_a + a * b
        return first - (conv_a - a) * (conv_b - b)

    if f.ndim == 2 and g.ndim == 2:
        return scalar_comm(f, g)
    if f.ndim == 3 and g.ndim == 3:
        out = np.empty((f.shape[0], g.shape[0]) + f.shape[1:])
        for i in range(f.shape[0]):
            for j in range(g.shape[0]):
                out[i, j] = scalar_comm(f[i], g[j])
        return out
    raise MollifyError("commutator expects two scalars or two vector fields")


# ---------------------------------------------------------------------------
# Multi-scale layer mollification
# ---------------------------------------------------------------------------

@dataclass
class MultiScaleMollification:
    """Per-layer mollifications with widths nu^beta_n glued across overlaps."""

    patch: UniformPatch
    layers: LayerDecomposition
    widths: tuple                 # nu^beta_n for n = 1..N
    width_map: np.ndarray         # per-row width index 1..N, 0 in the peeled strip
    conv: list                    # convolved field per width (same field shape)
    support: np.ndarray           # rows in the union of V_1..V_N

    def layer_field(self, n: int):
        """bar(f_n) on layer V_n: (values, row mask); exact on overlaps."""
        lo, hi = self.layers.intervals[n - 1]
        d = self.patch.d
        rows = (d > lo) & (d <= hi)
        n_layers = len(self.widths)
        vals = self.conv[n - 1]
        if n < n_layers:
            olo, ohi = self.layers.overlap_intervals[n - 1]
            in_overlap = (d > olo) & (d <= ohi)
            vals = np.where(in_overlap, self.conv[n], vals)
        return vals, rows

    def glued(self, transform=None) -> np.ndarray:
        """Width-map gluing of (optionally transformed) convolutions.

        Because adjacent layers share the same kernel on their overlap, the
        partition-weighted sum collapses to a lookup by width index.
        """
        fields_ = self.conv if transform is None else [transform(c) for c in self.conv]
        out = np.zeros_like(np.asarray(fields_[0]))
        for n, vals in enumerate(fields_, start=1):
            rows = self.width_map == n
            out[..., rows] = np.asarray(vals)[..., rows]
        return out


def mollify_multiscale(values: np.ndarray, layers: LayerDecomposition,
                       schedule: BetaSchedule, nu: float,
                       patch: UniformPatch) -> MultiScaleMollification:
    """Layer-dependent smoothing: width nu^beta_n on V_n, nu^beta_{n+1} on overlaps."""
    n_layers = schedule.n_layers
    widths = tuple(nu ** schedule.betas[n] for n in range(1, n_layers + 1))
    layer_idx = layers.layer_of_distance(patch.d)
    width_map = np.where(layer_idx <= n_layers, layer_idx, 0)
    support = width_map > 0

    conv = []
    for n, eps in enumerate(widths, start=1):
        kern = make_kernel(eps, patch.hx, patch.hy)
        rows = width_map == n
        ok = valid_rows(kern, patch)
        if rows.any() and not ok[rows].all():
            raise MollifyError(
                f"layer {n} width {eps:.4g} not resolved by patch "
                f"(hy={patch.hy:.4g}) or too close to the wall")
        conv.append(convolve(values, kern, patch))
    return MultiScaleMollification(patch=patch, layers=layers, widths=widths,
                                   width_map=width_map, conv=conv,
                                   support=support)
