"""Formal Laurent analysis of a simple pole along the contour x = 0.

A singular coefficient near the contour is written as
``u = exp(2i*phi(y)) * sum_j r_j(y) x^j`` and candidate solutions as
``psi = exp(i*phi(y)) * sum_j beta_j(y) x^j``.  This module checks the
order constraints a simple pole must satisfy, certifies the local
solvability conditions (Re r_0 = 0 and Im r_1 = phi''/2), and solves
the order-by-order recursion for the beta coefficients, which is
parametrized by the real pair (beta_{-1}, Im beta_1).

Coefficient functions of y come in two interchangeable representations:
exact polynomials (identities hold to machine precision) and uniform
samples (y-derivatives via 4th-order stencils, wider tolerances).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import MeromorphicViolation, NormalizationError
from .grid import diff_axis

#: default certification tolerances per representation
POLY_TOL = 1e-9
SAMPLED_TOL = 1e-6

#: y-nodes used to evaluate polynomial-mode conditions
N_CHECK = 201

_MAX_DEGREE = 16


@dataclass(frozen=True)
class FunctionOnInterval:
    """Function of y on [a, b]: exact polynomial or uniform samples."""

    a: float
    b: float
    mode: str  # "poly" | "samples"
    data: np.ndarray

    def __post_init__(self):
        if self.mode not in ("poly", "samples"):
            raise ValueError(f"unknown mode {self.mode!r}")
        data = np.atleast_1d(np.asarray(self.data, dtype=complex))
        object.__setattr__(self, "data", data)
        if not np.all(np.isfinite(data)):
            raise ValueError("non-finite coefficient data")
        if self.mode == "samples" and data.size < 5:
            raise ValueError("sampled mode needs at least 5 y-nodes")

    @classmethod
    def from_poly(cls, coeffs, interval: tuple[float, float]) -> "FunctionOnInterval":
        coeffs = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        if coeffs.size - 1 > _MAX_DEGREE:
            raise ValueError(f"polynomial degree limited to {_MAX_DEGREE}")
        return cls(interval[0], interval[1], "poly", coeffs)

    @classmethod
    def from_samples(cls, values, interval: tuple[float, float]) -> "FunctionOnInterval":
        return cls(interval[0], interval[1], "samples", np.asarray(values))

    @classmethod
    def constant(cls, value: complex, like: "FunctionOnInterval") -> "FunctionOnInterval":
        if like.mode == "poly":
            return cls(like.a, like.b, "poly", np.array([value], dtype=complex))
        return cls(like.a, like.b, "samples",
                   np.full(like.data.size, value, dtype=complex))

    @property
    def interval(self) -> tuple[float, float]:
        return (self.a, self.b)

    def nodes(self, n: int | None = None) -> np.ndarray:
        if self.mode == "samples":
            return np.linspace(self.a, self.b, self.data.size)
        return np.linspace(self.a, self.b, N_CHECK if n is None else n)

    def values_on(self, ys: np.ndarray) -> np.ndarray:
        """Evaluate at the given y values.

        Sampled functions are only defined on their own uniform nodes,
        so ``ys`` must coincide with them.
        """
        ys = np.asarray(ys, dtype=float)
        if self.mode == "poly":
            return np.polynomial.polynomial.polyval(ys, self.data)
        own = self.nodes()
        if ys.shape != own.shape or not np.allclose(ys, own, atol=1e-12, rtol=0):
            raise ValueError("sampled function evaluated off its own nodes")
        return self.data.copy()

    def sample(self) -> np.ndarray:
        return self.values_on(self.nodes())

    def deriv(self) -> "FunctionOnInterval":
        if self.mode == "poly":
            if self.data.size == 1:
                out = np.zeros(1, dtype=complex)
            else:
                out = np.polynomial.polynomial.polyder(self.data)
            return FunctionOnInterval(self.a, self.b, "poly", out)
        h = (self.b - self.a) / (self.data.size - 1)
        return FunctionOnInterval(self.a, self.b, "samples",
                                  diff_axis(self.data, h, axis=0))

    def _check_compatible(self, other: "FunctionOnInterval"):
        if self.mode != other.mode:
            raise ValueError("cannot mix polynomial and sampled functions")
        if (self.a, self.b) != (other.a, other.b):
            raise ValueError("functions live on different intervals")
        if self.mode == "samples" and self.data.size != other.data.size:
            raise ValueError("sampled functions use different node counts")

    def _binary(self, other, poly_op, sample_op):
        if np.isscalar(other):
            other = FunctionOnInterval.constant(complex(other), self)
        self._check_compatible(other)
        if self.mode == "poly":
            data = poly_op(self.data, other.data)
        else:
            data = sample_op(self.data, other.data)
        return FunctionOnInterval(self.a, self.b, self.mode, data)

    def __add__(self, other):
        return self._binary(other, np.polynomial.polynomial.polyadd, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.polynomial.polynomial.polysub,
                            lambda a, b: a - b)

    def __mul__(self, other):
        return self._binary(other, np.polynomial.polynomial.polymul, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return FunctionOnInterval(self.a, self.b, self.mode, -self.data)

    def conj(self) -> "FunctionOnInterval":
        # y is real, so conjugation acts on the data directly
        return FunctionOnInterval(self.a, self.b, self.mode, np.conj(self.data))

    def real_part(self) -> "FunctionOnInterval":
        return FunctionOnInterval(self.a, self.b, self.mode,
                                  self.data.real.astype(complex))

    def imag_part(self) -> "FunctionOnInterval":
        return FunctionOnInterval(self.a, self.b, self.mode,
                                  self.data.imag.astype(complex))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.sample())))

    def is_real(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.sample().imag)) <= tol)

    def is_zero(self, tol: float = 1e-14) -> bool:
        return self.max_abs() <= tol

    def to_json(self):
        return {"mode": self.mode, "interval": [self.a, self.b],
                "data": [[float(v.real), float(v.imag)] for v in self.data]}


def _zero_like(fn: FunctionOnInterval) -> FunctionOnInterval:
    return FunctionOnInterval.constant(0.0, fn)


@dataclass(frozen=True)
class PoleProfile:
    """Singular coefficient data: phase phi and Laurent coefficients r_j.

    ``n`` is the pole order (the lowest index is -n).  Coefficients not
    listed in ``r`` are zero.
    """

    phi: FunctionOnInterval
    r: Mapping[int, FunctionOnInterval]
    n: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("pole order must be >= 1")
        if -self.n not in self.r:
            raise ValueError(f"profile must supply the order {-self.n} coefficient")
        if not self.phi.is_real(1e-12):
            raise ValueError("phase must be real-valued")
        if not self.r[-self.n].is_real(1e-12):
            raise ValueError("the leading coefficient must be real-valued")
        for fn in self.r.values():
            self.phi._check_compatible(fn)
        object.__setattr__(self, "r", dict(self.r))

    @property
    def mode(self) -> str:
        return self.phi.mode

    def r_fn(self, j: int) -> FunctionOnInterval:
        return self.r.get(j, _zero_like(self.phi))

    def max_order(self) -> int:
        return max(self.r)

    def tolerance(self, tol: float | None = None) -> float:
        if tol is not None:
            return tol
        return POLY_TOL if self.mode == "poly" else SAMPLED_TOL


@dataclass(frozen=True)
class CoefficientSeries:
    """Truncated solution series: psi = e^{i phi} sum_j beta_j x^j."""

    phi: FunctionOnInterval
    beta: Mapping[int, FunctionOnInterval]
    n_prime: int
    order: int

    def __post_init__(self):
        lead = self.beta[-self.n_prime].sample()
        nonzero = np.count_nonzero(np.abs(lead) > 0.0)
        if nonzero < 0.99 * lead.size:
            raise ValueError("leading series coefficient vanishes on the interval")
        object.__setattr__(self, "beta", dict(self.beta))

    def beta_fn(self, j: int) -> FunctionOnInterval:
        return self.beta.get(j, _zero_like(self.phi))

    def to_json(self):
        return {
            "phi": self.phi.to_json(),
            "beta": {str(j): fn.to_json() for j, fn in sorted(self.beta.items())},
            "K": self.order,
            "mode": self.phi.mode,
        }


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a profile check; carries the worst offending node."""

    ok: bool
    condition: str = ""
    worst_y: float | None = None
    worst_value: float | None = None

    def __bool__(self):
        return self.ok

    def to_json(self):
        out = {"ok": self.ok, "condition": self.condition}
        if self.worst_y is not None:
            out["worst_y"] = float(self.worst_y)
            out["worst_value"] = float(self.worst_value)
        return out


def _worst(fn_values: np.ndarray, nodes: np.ndarray) -> tuple[float, float]:
    k = int(np.argmax(np.abs(fn_values)))
    return float(nodes[k]), float(np.abs(fn_values[k]))


def pole_order_check(profile: PoleProfile, n_prime: int,
                     tol: float = 1e-10) -> CheckResult:
    """Order constraints for a series solution with a pole of order n'.

    Existence of any such solution forces the coefficient pole to be
    simple and its leading modulus to equal n'/2 identically.
    """
    if profile.n != 1:
        return CheckResult(False, f"pole order n = {profile.n}, expected 1")
    lead = profile.r_fn(-1)
    nodes = lead.nodes()
    dev = np.abs(np.abs(lead.values_on(nodes)) - n_prime / 2.0)
    if np.max(dev) > tol:
        y, value = _worst(dev, nodes)
        return CheckResult(False, f"|r_-1| != {n_prime}/2", y, value)
    return CheckResult(True)


def normalize_profile(profile: PoleProfile, tol: float = 1e-10) -> PoleProfile:
    """Flip a +1/2 leading coefficient to -1/2 by a phase shift.

    Adds pi/2 to the phase and negates every r_j, which leaves the
    represented coefficient u unchanged.  Profiles whose leading
    coefficient is not +1/2 are rejected.
    """
    if profile.n != 1:
        raise NormalizationError(f"pole order n = {profile.n}, expected 1")
    lead = profile.r_fn(-1)
    nodes = lead.nodes()
    if np.max(np.abs(lead.values_on(nodes) - 0.5)) > tol:
        raise NormalizationError("leading coefficient is not identically +1/2")
    phi = profile.phi + (math.pi / 2)
    r = {j: -fn for j, fn in profile.r.items()}
    out = PoleProfile(phi, r, profile.n)
    _assert_same_u(profile, out)
    return out


def _assert_same_u(p1: PoleProfile, p2: PoleProfile, tol: float = 1e-12):
    nodes = p1.phi.nodes()
    xs = np.array([-0.7, -0.2, 0.31, 0.9])
    orders = sorted(set(p1.r) | set(p2.r))
    u1 = _u_on_probe(p1, xs, nodes, orders)
    u2 = _u_on_probe(p2, xs, nodes, orders)
    scale = max(1.0, float(np.max(np.abs(u1))))
    if np.max(np.abs(u1 - u2)) > tol * scale:
        raise NormalizationError("normalization changed the represented coefficient")


def _u_on_probe(profile: PoleProfile, xs, ys, orders) -> np.ndarray:
    phase = np.exp(2j * profile.phi.values_on(ys))
    acc = np.zeros((len(xs), len(ys)), dtype=complex)
    for j in orders:
        acc += (xs[:, None] ** j) * profile.r_fn(j).values_on(ys)[None, :]
    return phase[None, :] * acc


def meromorphic_certify(profile: PoleProfile, tol: float | None = None) -> CheckResult:
    """Local solvability conditions for the normalized simple pole.

    Passes iff Re r_0 vanishes identically and Im r_1 equals half the
    second derivative of the phase.  Requires a normalized profile
    (n = 1, r_-1 = -1/2).
    """
    _require_normalized(profile)
    tol = profile.tolerance(tol)
    nodes = profile.phi.nodes()
    re_r0 = profile.r_fn(0).values_on(nodes).real
    if np.max(np.abs(re_r0)) > tol:
        y, value = _worst(re_r0, nodes)
        return CheckResult(False, "Re r0 != 0", y, value)
    phi_pp = profile.phi.deriv().deriv().values_on(nodes).real
    gap = profile.r_fn(1).values_on(nodes).imag - 0.5 * phi_pp
    if np.max(np.abs(gap)) > tol:
        y, value = _worst(gap, nodes)
        return CheckResult(False, "Im r1 != phi''/2", y, value)
    return CheckResult(True)


def _require_normalized(profile: PoleProfile, tol: float = 1e-10):
    if profile.n != 1:
        raise NormalizationError(f"pole order n = {profile.n}, expected 1")
    lead = profile.r_fn(-1)
    if np.max(np.abs(lead.values_on(lead.nodes()) + 0.5)) > tol:
        raise NormalizationError("profile is not normalized to r_-1 = -1/2")


def conjugate_profile(profile: PoleProfile) -> PoleProfile:
    """Profile of the conjugate equation's coefficient.

    The conjugate coefficient -conj(u) has phase -(phi + pi/2) and
    coefficients conj(r_j); certifying one profile certifies the other.
    """
    phi = -(profile.phi + (math.pi / 2))
    r = {j: fn.conj() for j, fn in profile.r.items()}
    return PoleProfile(phi, r, profile.n)


def solve_recursion(profile: PoleProfile, beta_minus1: FunctionOnInterval,
                    im_beta1: FunctionOnInterval, order: int = 8,
                    tol: float | None = None) -> CoefficientSeries:
    """Solve the coefficient recursion up to the given truncation order.

    Parameters
    ----------
    profile : PoleProfile
        Normalized, certified profile (checked; violations raise
        MeromorphicViolation).
    beta_minus1 : FunctionOnInterval
        Real leading coefficient of the solution series.
    im_beta1 : FunctionOnInterval
        Real free parameter: the imaginary part of beta_1.  Together
        with beta_minus1 it parametrizes all series solutions.
    order : int
        Highest beta index produced.

    The order -1 equation determines beta_0, the real part of the
    order 0 equation determines Re beta_1 (its imaginary part asserts a
    compatibility condition that certified profiles satisfy), and each
    higher equation splits into real and imaginary parts that determine
    the next coefficient.
    """
    cert = meromorphic_certify(profile, tol)
    if not cert:
        raise MeromorphicViolation(
            f"profile fails certification: {cert.condition} "
            f"(worst |value| {cert.worst_value:.3e} at y = {cert.worst_y})")
    tol = profile.tolerance(tol)
    if not beta_minus1.is_real(1e-12):
        raise ValueError("beta_minus1 must be real-valued")
    if not im_beta1.is_real(1e-12):
        raise ValueError("im_beta1 must be real-valued")

    phi_p = profile.phi.deriv()
    beta = {-1: beta_minus1}
    # order -1 balance gives conj(beta_0)
    rhs = (-1j) * beta_minus1.deriv() + phi_p * beta_minus1 \
        + 2.0 * profile.r_fn(0) * beta_minus1.conj()
    beta[0] = rhs.conj()

    def rhs_k(k: int) -> FunctionOnInterval:
        acc = (-1j) * beta[k].deriv() + phi_p * beta[k] \
            + 2.0 * profile.r_fn(k + 1) * beta[-1].conj()
        for l in range(0, k + 1):
            acc = acc + 2.0 * profile.r_fn(l) * beta[k - l].conj()
        return acc

    r0 = rhs_k(0)
    im_r0 = float(np.max(np.abs(r0.sample().imag)))
    if im_r0 > 10 * max(tol, 1e-12):
        raise MeromorphicViolation(
            f"order-0 compatibility violated: |Im RHS| = {im_r0:.3e}")
    beta[1] = 0.5 * r0.real_part() + 1j * im_beta1.real_part()

    for k in range(1, order):
        rk = rhs_k(k)
        beta[k + 1] = (1.0 / (k + 2)) * rk.real_part() \
            + (1j / k) * rk.imag_part()

    return CoefficientSeries(profile.phi, beta, 1, order)


def series_residual(profile: PoleProfile, series: CoefficientSeries,
                    order: int | None = None) -> list[float]:
    """Per-order sup-norms of the equation defect of a series.

    Re-expands 2*d/dzbar(psi) - 2*u*conj(psi) in powers of x by direct
    coefficient convolution (independent of the recursion that produced
    the series) and returns the sup-norm of each coefficient from order
    -2 up to ``order - 1``.
    """
    if order is None:
        order = series.order
    phi_p = profile.phi.deriv()
    k_max = series.order

    def beta(j: int) -> FunctionOnInterval:
        if -1 <= j <= k_max:
            return series.beta_fn(j)
        return _zero_like(series.phi)

    defects = []
    r_top = profile.max_order()
    for k in range(-2, order):
        # 2*dbar(psi): x-derivative shifts orders down, y-derivative keeps them
        lhs = (k + 1) * beta(k + 1) + (1j) * beta(k).deriv() \
            + (-1.0) * phi_p * beta(k)
        # 2*u*conj(psi): Cauchy product of r and conj(beta)
        rhs = _zero_like(series.phi)
        for l in range(-profile.n, min(r_top, k + 1) + 1):
            m = k - l
            if -1 <= m <= k_max:
                rhs = rhs + 2.0 * profile.r_fn(l) * beta(m).conj()
        defects.append(float((lhs - rhs).max_abs()))
    return defects
