"""Two-step energy-stable time integration.

Each advance solves one implicit-explicit multistep update for the pair
(phi, u) -- two diagonal per-mode linear solves, nothing else -- followed
by an algebraic correction driven by an auxiliary energy variable q:

1. Predict ``(phi_bar, u_bar)`` from BDF extrapolation with the quadratic
   stabilizer treated implicitly, then damp q along the modeled
   dissipation rate, ``qbar = q / (1 + dt * H / E)``.
2. Scale the prediction by ``eta = 1 - (1 - qbar/E)^(k+1)`` and relax q
   toward the energy of the corrected state as far as the dissipation
   budget of the step allows (``zeta`` selects the admissible mix).

The construction guarantees q decreases monotonically regardless of time
step size; that bound is asserted at runtime on every step.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DivergenceError, GridMismatchError, RelaxationError
from .model import (
    ModelParams,
    crystal_area,
    evaluate_state,
    free_energy,
    free_energy_report,
    variational_explicit,
)
from .spectral import Grid, RealField, SpectralField

__all__ = [
    "BdfTableau",
    "StepReport",
    "Stepper",
    "extrapolate_a",
    "extrapolate_b",
    "update_qbar",
    "xi_eta",
    "relax_q",
]

log = logging.getLogger(__name__)

#: Relative slack allowed when asserting monotone decay of q.
Q_MONOTONE_RTOL = 1e-12

#: Relative threshold on E_next - qbar below which the relaxation
#: denominator is considered degenerate and zeta = 0 is used.
RELAX_GAP_RTOL = 1e-14


@dataclass(frozen=True)
class BdfTableau:
    """Backward-differentiation coefficients, newest history entry first.

    ``alpha`` multiplies the new solution; ``a_weights`` combine the
    history on the time-derivative side and ``b_weights`` build the
    extrapolated argument of the explicit terms. Consistency requires
    ``sum(a) = alpha`` and ``sum(b) = 1``.
    """

    order: int
    alpha: float
    a_weights: tuple
    b_weights: tuple

    @classmethod
    def of_order(cls, order: int) -> "BdfTableau":
        try:
            return _TABLEAUX[order]
        except KeyError:
            raise ValueError(f"unsupported multistep order {order}; use 1, 2 or 3")


_TABLEAUX = {
    1: BdfTableau(1, 1.0, (1.0,), (1.0,)),
    2: BdfTableau(2, 1.5, (2.0, -0.5), (2.0, -1.0)),
    3: BdfTableau(3, 11.0 / 6.0, (3.0, -1.5, 1.0 / 3.0), (3.0, -3.0, 1.0)),
}


def extrapolate_a(history, order: int) -> np.ndarray:
    """Time-derivative-side history combination A_k (arrays in, array out)."""
    tab = BdfTableau.of_order(order)
    if len(history) < order:
        raise ValueError(
            f"order {order} needs {order} history levels, have {len(history)}"
        )
    return sum(w * h for w, h in zip(tab.a_weights, history))


def extrapolate_b(history, order: int) -> np.ndarray:
    """Explicit-side extrapolation B_k (arrays in, array out)."""
    tab = BdfTableau.of_order(order)
    if len(history) < order:
        raise ValueError(
            f"order {order} needs {order} history levels, have {len(history)}"
        )
    return sum(w * h for w, h in zip(tab.b_weights, history))


def update_qbar(q_prev: float, dt: float, dissipation: float, energy: float) -> float:
    """Damp the auxiliary variable along the modeled dissipation rate."""
    if energy <= 0:
        raise RelaxationError(f"energy must be positive, got {energy}")
    if dissipation < 0:
        raise RelaxationError(f"dissipation rate must be >= 0, got {dissipation}")
    return q_prev / (1.0 + dt * dissipation / energy)


def xi_eta(qbar: float, energy: float, order: int):
    """Energy ratio xi and the scale correction eta = 1 - (1 - xi)^(k+1)."""
    xi = qbar / energy
    return xi, 1.0 - (1.0 - xi) ** (order + 1)


def relax_q(qbar: float, energy_bar: float, dissipation_bar: float,
            energy_next: float, dt: float):
    """Pull the auxiliary variable back toward the true energy.

    Returns ``(q_next, zeta, case)``. The new value is the convex mix
    ``zeta * qbar + (1 - zeta) * energy_next`` with the largest admissible
    pull (smallest zeta) such that the update stays within the step's
    dissipation budget ``dt * (qbar / energy_bar) * dissipation_bar``.
    """
    budget = dt * (qbar / energy_bar) * dissipation_bar
    gap = energy_next - qbar
    if gap <= 0:
        q_next, zeta, case = energy_next, 0.0, 1
    elif gap <= RELAX_GAP_RTOL * abs(energy_next) or budget >= gap:
        q_next, zeta, case = energy_next, 0.0, 2
    else:
        zeta = 1.0 - budget / gap
        q_next = zeta * qbar + (1.0 - zeta) * energy_next
        case = 3
    if not 0.0 <= zeta <= 1.0:
        raise RelaxationError(f"zeta = {zeta} outside [0, 1]")
    if q_next - qbar > budget + Q_MONOTONE_RTOL * max(1.0, abs(qbar)):
        raise RelaxationError(
            f"relaxed q exceeds the dissipation budget: "
            f"q_next - qbar = {q_next - qbar}, budget = {budget}"
        )
    return q_next, zeta, case


@dataclass(frozen=True)
class StepReport:
    """Per-step scalar diagnostics (column order of diagnostics.csv)."""

    step: int
    t: float
    energy: float
    energy_main: float
    q: float
    qbar: float
    xi: float
    eta: float
    zeta: float
    zeta_case: int
    dissipation: float
    area: float


class Stepper:
    """Owns the time-marching state: solution history, q, and counters.

    Parameters
    ----------
    grid, params : spatial setup and model coefficients.
    dt : float
        Time step size.
    order : int
        Target multistep order (1, 2 or 3). Until enough history exists
        the effective order ramps up from 1.
    forcing : callable, optional
        ``forcing(t) -> (RealField, RealField)`` source terms for the
        phase and heat equations, evaluated at the new time level. With
        forcing present the q-monotonicity check logs instead of raising
        (the dissipation premise does not hold under energy injection).
    dealias : bool
        Apply the 2/3-rule truncation to nonlinear products.
    scale_correction : bool
        Debug switch; ``False`` bypasses the corrective second step
        (eta = 1, q frozen) to isolate the plain multistep update.
    """

    def __init__(self, grid: Grid, params: ModelParams, dt: float, order: int, *,
                 forcing=None, dealias=False, scale_correction=True, t0=0.0):
        if dt <= 0:
            raise ValueError(f"dt must be positive, got {dt}")
        BdfTableau.of_order(order)
        self.grid = grid
        self.params = params
        self.dt = float(dt)
        self.order = int(order)
        self.forcing = forcing
        self.dealias = bool(dealias)
        self.scale_correction = bool(scale_correction)
        self.time = float(t0)
        self.step_index = 0
        self.q = None
        self.history_phi = []
        self.history_u = []
        self.zeta_case_counts = [0, 0, 0]
        self.linear_solves = 0
        self._divisors = {}

    # -- state management ------------------------------------------------

    def start(self, phi0: RealField, u0: RealField) -> None:
        """Initialize from a single state; q starts at its energy."""
        self._check_grid(phi0, u0)
        phi0.check_finite()
        u0.check_finite()
        self.history_phi = [phi0]
        self.history_u = [u0]
        with np.errstate(over="ignore", invalid="ignore"):
            self.q = free_energy(phi0, u0, self.params)
        self.step_index = 0

    def seed_history(self, phis, us, t_latest: float) -> None:
        """Initialize from known states at t_latest, t_latest - dt, ...

        Used by accuracy studies where the exact solution provides a
        full-order history; ``phis[0]`` is the newest state. q starts at
        the energy of the newest state.
        """
        if not 1 <= len(phis) <= self.order or len(phis) != len(us):
            raise ValueError("history must hold 1..order phase/heat pairs")
        self._check_grid(*phis, *us)
        self.history_phi = list(phis)
        self.history_u = list(us)
        self.q = free_energy(phis[0], us[0], self.params)
        self.time = float(t_latest)
        self.step_index = len(phis) - 1

    def _check_grid(self, *fields):
        for f in fields:
            if not self.grid.compatible(f.grid):
                raise GridMismatchError("state fields must live on the stepper grid")

    @property
    def effective_order(self) -> int:
        return min(self.order, len(self.history_phi))

    @property
    def phi(self) -> RealField:
        return self.history_phi[0]

    @property
    def u(self) -> RealField:
        return self.history_u[0]

    def initial_report(self) -> StepReport:
        """Diagnostics row for the starting state (step 0: no correction)."""
        with np.errstate(over="ignore", invalid="ignore"):
            ev = evaluate_state(self.phi, self.u, self.params)
        return StepReport(
            step=self.step_index, t=self.time, energy=ev.energy.total,
            energy_main=ev.energy.main, q=self.q, qbar=self.q, xi=1.0,
            eta=1.0, zeta=0.0, zeta_case=0, dissipation=ev.dissipation,
            area=crystal_area(self.phi),
        )

    # -- per-mode linear solves -------------------------------------------

    def _divisor_pair(self, order: int):
        """Diagonal symbols of the two implicit operators for this order."""
        try:
            return self._divisors[order]
        except KeyError:
            p = self.params
            alpha = BdfTableau.of_order(order).alpha
            k2 = self.grid._k2
            div_phi = p.tau * alpha / self.dt + p.s2 / p.eps**2 + p.s1 * k2
            div_u = alpha / self.dt + p.diffusivity * k2
            self._divisors[order] = (div_phi, div_u)
            return self._divisors[order]

    def _solve(self, rhs_values: np.ndarray, divisor: np.ndarray):
        """One diagonal per-mode solve: transform, divide, transform back."""
        rhs_hat = np.fft.rfftn(rhs_values, norm="forward")
        if self.dealias:
            rhs_hat = rhs_hat * self.grid._dealias_keep
        sol_hat = rhs_hat / divisor
        self.linear_solves += 1
        real = np.fft.irfftn(
            sol_hat, s=self.grid.shape, axes=self.grid._fft_axes, norm="forward"
        )
        return sol_hat, real

    # -- the step ----------------------------------------------------------

    def advance(self) -> StepReport:
        """Advance one step; returns the diagnostics of the new state."""
        # Overflow is a legitimate outcome here: it surfaces as a
        # non-finite field or energy and becomes a DivergenceError, so
        # the intermediate numpy warnings carry no extra information.
        with np.errstate(over="ignore", invalid="ignore"):
            return self._advance()

    def _advance(self) -> StepReport:
        if not self.history_phi:
            raise RuntimeError("call start() or seed_history() before advance()")
        p = self.params
        g = self.grid
        dt = self.dt
        k = self.effective_order
        tab = BdfTableau.of_order(k)
        t_new = self.time + dt
        step_new = self.step_index + 1

        phis = [f.values for f in self.history_phi]
        us = [f.values for f in self.history_u]
        a_phi = extrapolate_a(phis, k)
        b_phi = extrapolate_b(phis, k)
        a_u = extrapolate_a(us, k)
        b_u = extrapolate_b(us, k)

        force_phi = force_u = None
        if self.forcing is not None:
            force_phi, force_u = self.forcing(t_new)

        # Step 1a: implicit-explicit update of the phase field.
        dE1 = variational_explicit(RealField(g, b_phi), p, dealias=self.dealias)
        well_b, _ = kernels.double_well(b_phi, p.eps)
        rhs_phi = (p.tau / dt) * a_phi
        rhs_phi -= dE1.values
        rhs_phi -= (4.0 * p.lam * p.eps) * well_b * b_u
        if force_phi is not None:
            rhs_phi += force_phi.values
        div_phi, div_u = self._divisor_pair(k)
        phi_bar_hat, phi_bar = self._solve(rhs_phi, div_phi)
        if not np.isfinite(phi_bar).all():
            raise DivergenceError(step_new, "non-finite phase field after solve")

        # Step 1b: heat update, sourced by the discrete phase change rate.
        rhs_u = a_u / dt
        rhs_u += (
            (4.0 * p.eps**2 * p.latent_heat) * well_b * (tab.alpha * phi_bar - a_phi) / dt
        )
        if force_u is not None:
            rhs_u += force_u.values
        u_bar_hat, u_bar = self._solve(rhs_u, div_u)
        if not np.isfinite(u_bar).all():
            raise DivergenceError(step_new, "non-finite temperature field after solve")

        phi_bar_f = RealField(g, phi_bar)
        u_bar_f = RealField(g, u_bar)
        ev_bar = evaluate_state(
            phi_bar_f, u_bar_f, p,
            phi_hat=SpectralField(g, phi_bar_hat),
            u_hat=SpectralField(g, u_bar_hat),
        )
        e_bar = ev_bar.energy.total
        h_bar = ev_bar.dissipation
        if not (np.isfinite(e_bar) and np.isfinite(h_bar)):
            raise DivergenceError(step_new, "non-finite energy or dissipation")

        if not self.scale_correction:
            # Debug path: plain multistep update, auxiliary machinery off.
            report = StepReport(
                step=step_new, t=t_new, energy=e_bar, energy_main=ev_bar.energy.main,
                q=self.q, qbar=self.q, xi=1.0, eta=1.0, zeta=0.0, zeta_case=0,
                dissipation=h_bar, area=crystal_area(phi_bar_f),
            )
            self._push(phi_bar_f, u_bar_f, t_new, step_new, self.q)
            return report

        # Step 1c: damp q along the modeled dissipation.
        qbar = update_qbar(self.q, dt, h_bar, e_bar)
        if qbar <= 0.0:
            raise RelaxationError(f"qbar = {qbar} must stay positive")

        # Step 2: scale correction and relaxation of q.
        xi, eta = xi_eta(qbar, e_bar, k)
        phi_next = RealField(g, eta * phi_bar)
        u_next = RealField(g, eta * u_bar)
        grads_next = tuple(RealField(g, eta * c.values) for c in ev_bar.grad_phi)
        e_next = free_energy_report(phi_next, u_next, p, grad_phi=grads_next)
        q_next, zeta, case = relax_q(qbar, e_bar, h_bar, e_next.total, dt)

        if q_next > self.q * (1.0 + Q_MONOTONE_RTOL):
            msg = (
                f"auxiliary energy increased at step {step_new}: "
                f"{self.q} -> {q_next}"
            )
            if self.forcing is not None:
                log.warning(msg)
            else:
                raise RelaxationError(msg)

        self.zeta_case_counts[case - 1] += 1
        self._push(phi_next, u_next, t_new, step_new, q_next)
        return StepReport(
            step=step_new, t=t_new, energy=e_next.total, energy_main=e_next.main,
            q=q_next, qbar=qbar, xi=xi, eta=eta, zeta=zeta, zeta_case=case,
            dissipation=h_bar, area=crystal_area(phi_next),
        )

    def _push(self, phi, u, t_new, step_new, q_new):
        self.history_phi.insert(0, phi)
        self.history_u.insert(0, u)
        del self.history_phi[self.order:]
        del self.history_u[self.order:]
        self.time = t_new
        self.step_index = step_new
        self.q = q_new
