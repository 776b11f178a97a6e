"""Holomorphic change of variables between a curved neighborhood and a strip.

Under a holomorphic chart z(tau) the equations stay covariant when the
coefficient picks up the weight |dz/dtau| and solutions pick up
sqrt(dz/dtau) with a continuously tracked branch.  Pair potentials are
identified along the chart, i.e. evaluated at mapped points with no
extra weight.  The transform therefore commutes with the change of
variables, which is checked numerically node by node.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BranchError, DegenerateChartError
from .grid import Field, GridSpec
from .moutard import moutard_simple
from .potential import Potential, omega

#: minimum modulus of the chart derivative
DERIVATIVE_FLOOR = 1e-12

#: largest admissible argument jump of the sqrt argument between nodes
BRANCH_JUMP = np.pi / 2


@dataclass(frozen=True)
class HolomorphicChart:
    """Chart tau -> z(tau) with its derivative and inverse.

    All three maps are closed forms supplied by the caller (for the
    CLI: expression strings); the derivative is given, not
    differentiated numerically.
    """

    forward: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[np.ndarray], np.ndarray]
    strip: GridSpec

    def validate(self, tol: float = 1e-10) -> None:
        """Invertibility, injectivity and non-degeneracy on strip nodes."""
        tau = self.strip.z
        w = np.asarray(self.derivative(tau), dtype=complex)
        w = np.broadcast_to(w, tau.shape)
        if np.min(np.abs(w)) < DERIVATIVE_FLOOR:
            raise DegenerateChartError(
                f"chart derivative reaches {np.min(np.abs(w)):.3e}")
        zm = np.asarray(self.forward(tau), dtype=complex)
        back = np.asarray(self.inverse(zm), dtype=complex)
        gap = np.max(np.abs(back - tau))
        if gap > tol:
            raise ValueError(f"inverse(forward(tau)) deviates by {gap:.3e}")
        flat = np.sort_complex(zm.ravel())
        scale = max(1.0, float(np.max(np.abs(flat))))
        if np.min(np.abs(np.diff(flat))) < 1e-12 * scale:
            raise ValueError("chart is not injective on the sampled nodes")

    def derivative_on_strip(self) -> np.ndarray:
        w = np.asarray(self.derivative(self.strip.z), dtype=complex)
        w = np.broadcast_to(w, self.strip.shape()).copy()
        if np.min(np.abs(w)) < DERIVATIVE_FLOOR:
            raise DegenerateChartError(
                f"chart derivative reaches {np.min(np.abs(w)):.3e}")
        return w

    def mapped_nodes(self) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.forward(self.strip.z), dtype=complex),
                               self.strip.shape()).copy()

    def sample(self, fn: Callable[[np.ndarray], np.ndarray]) -> Field:
        """Sample a function of z at the mapped strip nodes."""
        return Field(self.strip, np.broadcast_to(
            np.asarray(fn(self.mapped_nodes()), dtype=complex),
            self.strip.shape()).copy())


def identity_chart(strip: GridSpec) -> HolomorphicChart:
    return HolomorphicChart(lambda t: t, lambda t: np.ones_like(t),
                            lambda zv: zv, strip)


def tracked_sqrt(w: np.ndarray) -> np.ndarray:
    """Square root with the branch tracked continuously from the center.

    The argument of w is unwrapped along the center row and then along
    every column; a jump above pi/2 between neighbors means the samples
    cannot pin down a continuous branch and raises BranchError.
    """
    jump_x = np.angle(w[1:, :] / w[:-1, :])
    jump_y = np.angle(w[:, 1:] / w[:, :-1])
    worst = max(np.max(np.abs(jump_x), initial=0.0),
                np.max(np.abs(jump_y), initial=0.0))
    if worst > BRANCH_JUMP:
        raise BranchError(
            f"argument of the sqrt argument jumps by {worst:.3f} rad between "
            f"adjacent nodes (limit {BRANCH_JUMP:.3f})")
    ic, jc = w.shape[0] // 2, w.shape[1] // 2
    phase = np.empty(w.shape)
    row = np.zeros(w.shape[0])
    row[ic] = np.angle(w[ic, jc])
    row[ic + 1:] = row[ic] + np.cumsum(jump_x[ic:, jc])
    row[:ic] = row[ic] - np.cumsum(jump_x[:ic, jc][::-1])[::-1]
    phase[:, jc] = row
    phase[:, jc + 1:] = row[:, None] + np.cumsum(jump_y[:, jc:], axis=1)
    phase[:, :jc] = row[:, None] - np.cumsum(jump_y[:, :jc][:, ::-1], axis=1)[:, ::-1]
    return np.sqrt(np.abs(w)) * np.exp(0.5j * phase)


def pushforward_u(u_on_mapped: Field | Callable, chart: HolomorphicChart) -> Field:
    """Coefficient in strip coordinates: u(z(tau)) * |dz/dtau|."""
    if callable(u_on_mapped):
        u_on_mapped = chart.sample(u_on_mapped)
    w = chart.derivative_on_strip()
    return Field(chart.strip, u_on_mapped.values * np.abs(w), role="coefficient")


def pushforward_psi(psi_on_mapped: Field | Callable, chart: HolomorphicChart,
                    branch: str = "principal") -> Field:
    """Solution in strip coordinates: psi(z(tau)) * sqrt(dz/dtau).

    ``branch`` chooses the global sign of the square root ("principal"
    anchors the center node to the principal branch, "negative" flips
    it); the two choices differ only by an overall sign.
    """
    if callable(psi_on_mapped):
        psi_on_mapped = chart.sample(psi_on_mapped)
    s = tracked_sqrt(chart.derivative_on_strip())
    if branch == "negative":
        s = -s
    elif branch != "principal":
        raise ValueError(f"unknown branch {branch!r}")
    return Field(chart.strip, psi_on_mapped.values * s)


@dataclass(frozen=True)
class CommutativityResult:
    """Node-wise deviations between transform-then-map and map-then-transform."""

    u_deviation: float
    psi_deviation: float

    @property
    def max_deviation(self) -> float:
        return max(self.u_deviation, self.psi_deviation)


def check_commutativity(chart: HolomorphicChart,
                        u_of_z: Callable,
                        f1_of_z: Callable, f1_plus_of_z: Callable,
                        psi_of_z: Callable,
                        d_side_omega_ff: Callable | None = None,
                        d_side_omega_pf: Callable | None = None,
                        basepoint: tuple[int, int] = (0, 0),
                        constant_ff: complex = 0.0,
                        constant_pf: complex = 0.0,
                        branch: str = "principal") -> CommutativityResult:
    """Compare transforming before and after the change of variables.

    Route A transforms on the curved side (sampled at mapped nodes,
    with identified potentials) and pushes the results forward; route B
    pushes coefficient, seeds and probe forward and transforms on the
    strip.  When closed-form curved-side potentials are supplied they
    feed route A and fix the constants of route B's quadrature;
    otherwise one quadrature potential is shared by both routes and the
    check isolates the covariance weights.
    """
    chart.validate()
    strip = chart.strip
    w = chart.derivative_on_strip()
    s = tracked_sqrt(w)
    if branch == "negative":
        s = -s

    u_d = chart.sample(u_of_z)
    f1_d = chart.sample(f1_of_z)
    f1p_d = chart.sample(f1_plus_of_z)
    psi_d = chart.sample(psi_of_z)

    u_s = Field(strip, u_d.values * np.abs(w), role="coefficient")
    f1_s = Field(strip, f1_d.values * s)
    f1p_s = Field(strip, f1p_d.values * s)
    psi_s = Field(strip, psi_d.values * s)

    if d_side_omega_ff is not None:
        om_ff_a = Potential.from_values(
            strip, np.asarray(d_side_omega_ff(chart.mapped_nodes()), dtype=complex),
            basepoint)
        om_pf_a = Potential.from_values(
            strip, np.asarray(d_side_omega_pf(chart.mapped_nodes()), dtype=complex),
            basepoint)
        om_ff_b = omega(f1_s, f1p_s, basepoint, om_ff_a.values[basepoint])
        om_pf_b = omega(psi_s, f1p_s, basepoint, om_pf_a.values[basepoint])
    else:
        om_ff_a = om_ff_b = omega(f1_s, f1p_s, basepoint, constant_ff)
        om_pf_a = om_pf_b = omega(psi_s, f1p_s, basepoint, constant_pf)

    # route A: transform at mapped nodes, then push forward
    m_a = moutard_simple(u_d, f1_d, f1p_d, om_ff_a)
    u_route_a = m_a.u_tilde.values * np.abs(w)
    psi_route_a = m_a.map_psi(psi_d, om_pf_a).values * s

    # route B: push forward, then transform on the strip
    m_b = moutard_simple(u_s, f1_s, f1p_s, om_ff_b)
    u_route_b = m_b.u_tilde.values
    psi_route_b = m_b.map_psi(psi_s, om_pf_b).values

    mask = strip.mask
    dev_u = float(np.max(np.abs((u_route_a - u_route_b)[mask])))
    dev_psi = float(np.max(np.abs((psi_route_a - psi_route_b)[mask])))
    return CommutativityResult(dev_u, dev_psi)
