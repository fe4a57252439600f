"""Phase-field model for anisotropic solidification with undercooling.

The state is a phase field ``phi`` (+1 solid, -1 liquid) and a temperature
deviation ``u``, coupled through a free energy

    E(phi, u) = int( 1/2 |m(grad phi) grad phi|^2
                     + lam/(2 eps K) u^2 + F(phi) ) dx + 1,

with ``F(phi) = (phi^2 - 1)^2 / (4 eps^2)`` and an orientation-dependent
mobility factor ``m``. The constant ``+1`` keeps ``E >= 1`` so the auxiliary
energy variable stays safely positive.

For time stepping the energy is split as ``E = E_main + E_quad`` with a
quadratic stabilizer part

    E_quad = int( s1/2 |grad phi|^2 + s2/(2 eps^2) phi^2 ) dx + 1

whose variational derivative is treated implicitly; the remainder
``E_main = E - E_quad`` is treated explicitly. Everything here is spatial:
no time discretization enters this module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError
from .spectral import (
    Grid,
    RealField,
    SpectralField,
    gradient,
    gradient_from_spectral,
    integrate,
    l2_norm_sq,
    to_spectral,
)

__all__ = [
    "ModelParams",
    "EnergyBreakdown",
    "StateEval",
    "well_density",
    "well_derivative",
    "anisotropy",
    "anisotropy_values",
    "chemical_potential",
    "variational_explicit",
    "variational_quadratic",
    "free_energy",
    "free_energy_report",
    "dissipation_rate",
    "evaluate_state",
    "crystal_area",
]

ANISO_FORMS = ("quartic", "trig")


@dataclass(frozen=True)
class ModelParams:
    """Physical and numerical parameters of the solidification model.

    Parameters
    ----------
    tau : float
        Phase-field relaxation time (> 0).
    eps : float
        Interface width parameter (> 0).
    lam : float
        Coupling strength between phase and temperature (> 0).
    latent_heat : float
        Latent heat coefficient K (> 0).
    diffusivity : float
        Thermal diffusivity D (> 0).
    sigma : float
        Anisotropy strength, in [0, 1); the quartic form additionally
        requires sigma < 1/3 so the factor stays positive.
    folds : int
        Rotational symmetry count of the anisotropy (4 for the quartic
        form; the trigonometric form accepts any positive count).
    s1, s2 : float
        Stabilization coefficients of the quadratic energy part (>= 0).
    aniso_form : str
        'quartic' (fourfold rational form, works in 2-D and 3-D) or
        'trig' (cosine-of-angle form, 2-D only).
    grad_reg : float
        Squared-gradient threshold below which the orientation is treated
        as undefined and the anisotropy reduces to m = 1, H = 0.
    """

    tau: float
    eps: float
    lam: float
    latent_heat: float
    diffusivity: float
    sigma: float = 0.0
    folds: int = 4
    s1: float = 0.0
    s2: float = 0.0
    aniso_form: str = "quartic"
    grad_reg: float = 1e-12

    def __post_init__(self):
        for name in ("tau", "eps", "lam", "latent_heat", "diffusivity"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive", key=f"model.{name}")
        if not 0.0 <= self.sigma < 1.0:
            raise ConfigError("sigma must lie in [0, 1)", key="model.sigma")
        if self.aniso_form not in ANISO_FORMS:
            raise ConfigError(
                f"anisotropy form must be one of {ANISO_FORMS}", key="model.form"
            )
        if int(self.folds) != self.folds or self.folds < 1:
            raise ConfigError("folds must be a positive integer", key="model.folds")
        object.__setattr__(self, "folds", int(self.folds))
        if self.aniso_form == "quartic":
            if self.folds != 4:
                raise ConfigError(
                    "the quartic anisotropy encodes fourfold symmetry; "
                    "set folds = 4 or switch to the trig form",
                    key="model.folds",
                )
            if not self.sigma < 1.0 / 3.0:
                raise ConfigError(
                    "quartic anisotropy requires sigma < 1/3", key="model.sigma"
                )
        if self.s1 < 0 or self.s2 < 0:
            raise ConfigError("stabilizers s1, s2 must be >= 0", key="model.s1")
        if not self.grad_reg > 0:
            raise ConfigError("grad_reg must be positive", key="model.grad_reg")

    @property
    def u_weight(self):
        """Coefficient lam / (2 eps K) of the temperature energy term."""
        return self.lam / (2.0 * self.eps * self.latent_heat)


def well_density(phi: RealField, params: ModelParams) -> RealField:
    """Double-well energy density F(phi)."""
    big_f, _ = kernels.double_well(phi.values, params.eps)
    return RealField(phi.grid, big_f)


def well_derivative(phi: RealField, params: ModelParams) -> RealField:
    """Derivative f(phi) = F'(phi) = (phi^3 - phi) / eps^2."""
    _, little_f = kernels.double_well(phi.values, params.eps)
    return RealField(phi.grid, little_f)


def anisotropy_values(components, params: ModelParams):
    """Pointwise anisotropy on raw gradient-component arrays.

    Returns ``(m, h, g2)`` with ``h`` a tuple matching the component count.
    Accepts arrays of any common shape, which makes it usable both on grid
    fields and on sampled gradient vectors.
    """
    comps = [np.asarray(c, dtype=np.float64) for c in components]
    if len(comps) == 2:
        m, hx, hy, g2 = kernels.aniso_2d(
            comps[0],
            comps[1],
            params.sigma,
            params.folds,
            params.aniso_form == "quartic",
            params.grad_reg,
        )
        return m, (hx, hy), g2
    if len(comps) == 3:
        if params.aniso_form != "quartic":
            raise ConfigError(
                "trigonometric anisotropy is only available in 2-D; "
                "use the quartic form for 3-D runs",
                key="model.form",
            )
        m, hx, hy, hz, g2 = kernels.aniso_3d(
            comps[0], comps[1], comps[2], params.sigma, params.grad_reg
        )
        return m, (hx, hy, hz), g2
    raise ValueError(f"expected 2 or 3 gradient components, got {len(comps)}")


def anisotropy(grad_phi, params: ModelParams):
    """Anisotropy factor m and derivative H on gradient fields.

    ``H`` is the derivative of ``m`` with respect to the gradient vector,
    so that the anisotropic flux is ``m^2 grad phi + |grad phi|^2 m H``.
    """
    grid = grad_phi[0].grid
    m, h, _ = anisotropy_values([c.values for c in grad_phi], params)
    return RealField(grid, m), tuple(RealField(grid, hc) for hc in h)


def _flux_values(grads, params):
    """Anisotropic flux components plus (m, g2) from gradient arrays."""
    m, h, g2 = anisotropy_values(grads, params)
    mm = m * m
    g2m = g2 * m
    flux = [mm * gc + g2m * hc for gc, hc in zip(grads, h)]
    return flux, m, g2


def _mu_hat(grid: Grid, flux, dealias: bool):
    """Spectral coefficients of -div(flux)."""
    acc = None
    for ik, comp in zip(grid._ik, flux):
        term = ik * np.fft.rfftn(comp, norm="forward")
        acc = term if acc is None else acc + term
    if dealias:
        acc = acc * grid._dealias_keep
    return -acc


def chemical_potential(
    phi: RealField, params: ModelParams, *, phi_hat=None, dealias=False
) -> RealField:
    """Variational derivative of the free energy with respect to phi.

    Computed directly as ``-div(m^2 grad phi + |grad phi|^2 m H) + f(phi)``;
    it carries no stabilizer terms and is therefore independent of s1, s2.
    """
    grid = phi.grid
    if phi_hat is None:
        phi_hat = to_spectral(phi)
    grads = [c.values for c in gradient_from_spectral(phi_hat)]
    flux, _, _ = _flux_values(grads, params)
    mu_hat = _mu_hat(grid, flux, dealias)
    mu = np.fft.irfftn(mu_hat, s=grid.shape, axes=grid._fft_axes, norm="forward")
    _, little_f = kernels.double_well(phi.values, params.eps)
    return RealField(grid, mu + little_f)


def variational_explicit(
    phi: RealField, params: ModelParams, *, phi_hat=None, dealias=False
) -> RealField:
    """Variational derivative of the explicitly treated energy part.

    Equals ``chemical_potential + s1 lap(phi) - (s2/eps^2) phi``; the
    Laplacian correction is folded into the same inverse transform as the
    flux divergence.
    """
    grid = phi.grid
    if phi_hat is None:
        phi_hat = to_spectral(phi)
    grads = [c.values for c in gradient_from_spectral(phi_hat)]
    flux, _, _ = _flux_values(grads, params)
    acc = _mu_hat(grid, flux, dealias) - params.s1 * grid._k2 * phi_hat.coeffs
    out = np.fft.irfftn(acc, s=grid.shape, axes=grid._fft_axes, norm="forward")
    _, little_f = kernels.double_well(phi.values, params.eps)
    out += little_f
    out -= (params.s2 / params.eps**2) * phi.values
    return RealField(grid, out)


def variational_quadratic(
    phi: RealField, params: ModelParams, *, phi_hat=None
) -> RealField:
    """Variational derivative of the quadratic stabilizer part:
    ``-s1 lap(phi) + (s2/eps^2) phi``."""
    grid = phi.grid
    if phi_hat is None:
        phi_hat = to_spectral(phi)
    lap = np.fft.irfftn(
        -grid._k2 * phi_hat.coeffs, s=grid.shape, axes=grid._fft_axes, norm="forward"
    )
    return RealField(grid, -params.s1 * lap + (params.s2 / params.eps**2) * phi.values)


@dataclass(frozen=True)
class EnergyBreakdown:
    """Total free energy and its stabilized splitting (total = main + quad)."""

    total: float
    main: float
    quad: float


def free_energy_report(
    phi: RealField, u: RealField, params: ModelParams, *, grad_phi=None
) -> EnergyBreakdown:
    """Free energy and its splitting in one pass.

    ``grad_phi`` may supply precomputed gradient fields to avoid a
    transform (the caller guarantees they belong to ``phi``).
    """
    grid = phi.grid
    if grad_phi is None:
        grad_phi = gradient(phi)
    grads = [c.values for c in grad_phi]
    m, _, g2 = anisotropy_values(grads, params)
    big_f, _ = kernels.double_well(phi.values, params.eps)
    dens_total = 0.5 * (m * m) * g2 + params.u_weight * (u.values * u.values) + big_f
    dens_quad = 0.5 * params.s1 * g2 + (
        0.5 * params.s2 / params.eps**2
    ) * (phi.values * phi.values)
    total = grid.cell_volume * float(dens_total.sum()) + 1.0
    quad = grid.cell_volume * float(dens_quad.sum()) + 1.0
    return EnergyBreakdown(total=total, main=total - quad, quad=quad)


def free_energy(phi: RealField, u: RealField, params: ModelParams) -> float:
    """Total free energy E(phi, u)."""
    return free_energy_report(phi, u, params).total


@dataclass(frozen=True)
class StateEval:
    """One-pass evaluation of the functionals the stepper needs."""

    energy: EnergyBreakdown
    dissipation: float
    grad_phi: tuple


def evaluate_state(
    phi: RealField,
    u: RealField,
    params: ModelParams,
    *,
    phi_hat: SpectralField = None,
    u_hat: SpectralField = None,
) -> StateEval:
    """Free energy, its splitting, and the dissipation rate of a state.

    Shares the gradient and anisotropy evaluation between the energy and
    the dissipation functional; accepts precomputed transforms when the
    caller already has them (e.g. right after a spectral solve).
    """
    grid = phi.grid
    if phi_hat is None:
        phi_hat = to_spectral(phi)
    if u_hat is None:
        u_hat = to_spectral(u)
    grad_fields = gradient_from_spectral(phi_hat)
    grads = [c.values for c in grad_fields]
    flux, m, g2 = _flux_values(grads, params)
    big_f, little_f = kernels.double_well(phi.values, params.eps)

    dens_total = 0.5 * (m * m) * g2 + params.u_weight * (u.values * u.values) + big_f
    dens_quad = 0.5 * params.s1 * g2 + (
        0.5 * params.s2 / params.eps**2
    ) * (phi.values * phi.values)
    total = grid.cell_volume * float(dens_total.sum()) + 1.0
    quad = grid.cell_volume * float(dens_quad.sum()) + 1.0
    energy = EnergyBreakdown(total=total, main=total - quad, quad=quad)

    mu = np.fft.irfftn(
        _mu_hat(grid, flux, False), s=grid.shape, axes=grid._fft_axes, norm="forward"
    )
    mu += little_f
    drive = mu + (4.0 * params.lam * params.eps) * big_f * u.values
    grad_u_sq = 0.0
    for ik in grid._ik:
        du = np.fft.irfftn(
            ik * u_hat.coeffs, s=grid.shape, axes=grid._fft_axes, norm="forward"
        )
        grad_u_sq += float(np.vdot(du, du).real)
    grad_u_sq *= grid.cell_volume
    diss = (
        grid.cell_volume * float(np.vdot(drive, drive).real) / params.tau
        + (params.lam * params.diffusivity / (params.eps * params.latent_heat))
        * grad_u_sq
    )
    return StateEval(energy=energy, dissipation=diss, grad_phi=grad_fields)


def dissipation_rate(phi: RealField, u: RealField, params: ModelParams) -> float:
    """Rate functional driving the auxiliary-variable dynamics.

    ``(1/tau) ||dE/dphi + 4 lam eps F(phi) u||^2
    + (lam D / (eps K)) ||grad u||^2`` -- nonnegative by construction.
    """
    return evaluate_state(phi, u, params).dissipation


def crystal_area(phi: RealField) -> float:
    """Measure of the solid region, ``int (1 + phi)/2 dx``."""
    return float(phi.grid.cell_volume * (0.5 * (1.0 + phi.values)).sum())
