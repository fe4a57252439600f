"""Periodic grids, Fourier transforms, spectral calculus and quadrature.

Fields live on uniform tensor-product grids over periodic boxes. Spectral
coefficients follow the standard FFT ordering ``0, 1, ..., N/2-1, -N/2,
..., -1`` per axis, scaled by ``2*pi/L`` so that a wavenumber is the
effective differentiation factor. Real fields are stored in half-spectrum
(rfft) layout along the last axis; Hermitian symmetry is maintained by
construction.

Conventions fixed here and relied on everywhere else:

* ``to_spectral`` uses the forward-normalized transform, so the coefficient
  of mode ``k`` is the discrete Fourier coefficient of the samples
  (a constant field has a single nonzero coefficient equal to that value).
* Odd-order derivatives (gradient, divergence) zero the Nyquist mode
  coefficient per axis; the Laplacian keeps it.
* All integrals are rectangle-rule sums: ``prod(h_i) * sum(values)``,
  exact for trigonometric polynomials below the Nyquist frequency.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import GridMismatchError

__all__ = [
    "Grid",
    "RealField",
    "SpectralField",
    "to_spectral",
    "to_real",
    "gradient",
    "gradient_from_spectral",
    "laplacian",
    "laplacian_from_spectral",
    "divergence",
    "integrate",
    "l2_norm_sq",
    "grad_norm_sq",
]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform periodic grid on a rectangular box in 2 or 3 dimensions.

    Parameters
    ----------
    shape : tuple of int
        Points per dimension. Each entry must be even and at least 8.
    lengths : tuple of float, optional
        Box edge lengths; defaults to ``2*pi`` per dimension.
    """

    shape: tuple
    lengths: tuple = None

    def __post_init__(self):
        shape = tuple(int(n) for n in self.shape)
        if len(shape) not in (2, 3):
            raise ValueError(f"grid must be 2- or 3-dimensional, got {len(shape)}")
        for n in shape:
            if n < 8 or n % 2 != 0:
                raise ValueError(f"points per dimension must be even and >= 8, got {n}")
        if self.lengths is None:
            lengths = (TWO_PI,) * len(shape)
        else:
            lengths = tuple(float(x) for x in self.lengths)
        if len(lengths) != len(shape):
            raise ValueError("lengths must match the grid dimension")
        if any(x <= 0 for x in lengths):
            raise ValueError("box edge lengths must be positive")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "lengths", lengths)

        spacing = tuple(L / n for L, n in zip(lengths, shape))
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "cell_volume", float(np.prod(spacing)))
        object.__setattr__(self, "volume", float(np.prod(lengths)))

        # Integer mode numbers in FFT order per axis; last axis also in
        # half-spectrum (rfft) order.
        modes = [np.fft.fftfreq(n, d=1.0 / n) for n in shape]
        modes_r = list(modes)
        modes_r[-1] = np.fft.rfftfreq(shape[-1], d=1.0 / shape[-1])
        scaled = tuple(TWO_PI / L * m for L, m in zip(lengths, modes))
        object.__setattr__(self, "_modes_full", tuple(modes))
        object.__setattr__(self, "_wavenumbers_full", scaled)

        # Broadcastable ik arrays in rfft layout, Nyquist zeroed (odd
        # derivatives), and |k|^2 with Nyquist kept (Laplacian).
        dim = len(shape)
        ik = []
        k2 = np.zeros([len(m) for m in modes_r])
        for axis, (n, L, m) in enumerate(zip(shape, lengths, modes_r)):
            k_axis = TWO_PI / L * m
            bshape = [1] * dim
            bshape[axis] = len(m)
            k2 = k2 + (k_axis**2).reshape(bshape)
            k_odd = k_axis.copy()
            k_odd[np.abs(m) == n // 2] = 0.0
            ik.append((1j * k_odd).reshape(bshape))
        object.__setattr__(self, "_ik", tuple(ik))
        object.__setattr__(self, "_k2", k2)
        object.__setattr__(self, "_fft_axes", tuple(range(dim)))

        # 2/3-rule mask (True = keep) for optional dealiasing of products.
        keep = np.ones(k2.shape, dtype=bool)
        for axis, (n, m) in enumerate(zip(shape, modes_r)):
            bshape = [1] * dim
            bshape[axis] = len(m)
            keep = keep & (np.abs(m) <= n // 3).reshape(bshape)
        object.__setattr__(self, "_dealias_keep", keep)

    @property
    def dim(self):
        return len(self.shape)

    @property
    def npoints(self):
        return int(np.prod(self.shape))

    @property
    def spectral_shape(self):
        """Array shape of half-spectrum coefficient storage."""
        s = list(self.shape)
        s[-1] = s[-1] // 2 + 1
        return tuple(s)

    def axes(self):
        """1-D coordinate arrays, one per dimension."""
        return tuple(h * np.arange(n) for h, n in zip(self.spacing, self.shape))

    def coords(self):
        """Broadcastable coordinate arrays (sparse ``ij`` meshgrid)."""
        return tuple(np.meshgrid(*self.axes(), indexing="ij", sparse=True))

    def wavenumbers(self):
        """Full-spectrum effective wavenumbers ``2*pi*k/L`` per axis, FFT order."""
        return self._wavenumbers_full

    def nyquist_index(self, axis):
        return self.shape[axis] // 2

    def compatible(self, other):
        return self is other or (
            self.shape == other.shape and self.lengths == other.lengths
        )


def _require_same_grid(*fields):
    g = fields[0].grid
    for f in fields[1:]:
        if not g.compatible(f.grid):
            raise GridMismatchError(
                f"fields live on different grids: {g.shape}/{g.lengths} "
                f"vs {f.grid.shape}/{f.grid.lengths}"
            )
    return g


@dataclass(frozen=True, eq=False)
class RealField:
    """Real-valued samples on a :class:`Grid` (float64, grid shape)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != self.grid.shape:
            raise ValueError(
                f"field shape {v.shape} does not match grid shape {self.grid.shape}"
            )
        object.__setattr__(self, "values", v)

    def check_finite(self):
        """Raise if any sample is NaN or infinite. Used at I/O boundaries."""
        if not np.isfinite(self.values).all():
            raise ValueError("field contains non-finite values")
        return self

    def copy(self):
        return RealField(self.grid, self.values.copy())


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Half-spectrum Fourier coefficients of a real field."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != self.grid.spectral_shape:
            raise ValueError(
                f"coefficient shape {c.shape} does not match "
                f"spectral shape {self.grid.spectral_shape}"
            )
        object.__setattr__(self, "coeffs", c)

    @property
    def nyquist_mask(self):
        """Per-axis boolean arrays flagging the ``-N/2`` mode in storage order."""
        masks = []
        for axis, n in enumerate(self.grid.shape):
            if axis == self.grid.dim - 1:
                m = np.fft.rfftfreq(n, d=1.0 / n)
            else:
                m = np.fft.fftfreq(n, d=1.0 / n)
            masks.append(np.abs(m) == n // 2)
        return tuple(masks)


def to_spectral(f: RealField) -> SpectralField:
    """Forward transform; coefficients are normalized Fourier coefficients."""
    return SpectralField(f.grid, np.fft.rfftn(f.values, norm="forward"))


def to_real(F: SpectralField) -> RealField:
    """Inverse of :func:`to_spectral`."""
    g = F.grid
    return RealField(g, np.fft.irfftn(F.coeffs, s=g.shape, axes=g._fft_axes, norm="forward"))


def gradient_from_spectral(F: SpectralField):
    """Gradient components from coefficients (Nyquist modes dropped)."""
    g = F.grid
    return tuple(
        RealField(
            g, np.fft.irfftn(ik * F.coeffs, s=g.shape, axes=g._fft_axes, norm="forward")
        )
        for ik in g._ik
    )


def gradient(f: RealField):
    """Spectral gradient of a real field."""
    return gradient_from_spectral(to_spectral(f))


def laplacian_from_spectral(F: SpectralField) -> RealField:
    g = F.grid
    return RealField(
        g, np.fft.irfftn(-g._k2 * F.coeffs, s=g.shape, axes=g._fft_axes, norm="forward")
    )


def laplacian(f: RealField) -> RealField:
    """Spectral Laplacian (Nyquist modes retained)."""
    return laplacian_from_spectral(to_spectral(f))


def divergence(components: Sequence[RealField]) -> RealField:
    """Spectral divergence of a vector field (Nyquist modes dropped)."""
    g = _require_same_grid(*components)
    if len(components) != g.dim:
        raise ValueError(
            f"divergence needs {g.dim} components on this grid, got {len(components)}"
        )
    acc = None
    for ik, comp in zip(g._ik, components):
        term = ik * np.fft.rfftn(comp.values, norm="forward")
        acc = term if acc is None else acc + term
    return RealField(g, np.fft.irfftn(acc, s=g.shape, axes=g._fft_axes, norm="forward"))


def integrate(f: RealField) -> float:
    """Rectangle-rule integral over the periodic box."""
    return float(f.grid.cell_volume * f.values.sum())


def l2_norm_sq(f: RealField) -> float:
    """Squared L2 norm, same quadrature as :func:`integrate`."""
    return float(f.grid.cell_volume * np.vdot(f.values, f.values).real)


def grad_norm_sq(f: RealField) -> float:
    """Squared L2 norm of the spectral gradient."""
    return sum(l2_norm_sq(c) for c in gradient(f))
