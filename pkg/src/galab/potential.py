"""Imaginary-valued pair potentials built by quadrature.

For a solution/conjugate-solution pair (psi, psi+) the potential w
satisfies dw/dz = psi*psi+ and dw/dzbar = -conj(psi*psi+), i.e. in real
form dw = 2i*Im(p) dx + 2i*Re(p) dy with p = psi*psi+.  The form is
closed exactly when the pair solves the equations, so the potential is
recovered by integrating along axis-aligned L-paths from a basepoint,
up to a caller-chosen imaginary constant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from ._integrate import cumulative_integral, integral
from .errors import ExactnessError, PositivityError, ShapeError
from .grid import Field, GridSpec

if TYPE_CHECKING:
    from .singularity import SingularFieldModel

#: pairs whose x-then-y and y-then-x integrals disagree by more than
#: this are rejected as incompatible
DEFAULT_EXACTNESS_TOL = 1e-6

#: admissible real part of an "imaginary-valued" array
REAL_DRIFT_TOL = 1e-10


@dataclass(frozen=True)
class Potential:
    """Imaginary-valued potential of a solution pair.

    ``constant`` is the value at ``basepoint``; ``path_defect`` records
    the disagreement between the two L-path orientations (a closedness
    diagnostic), ``half_constants`` the per-half basepoint values for
    potentials integrated separately on x > 0 and x < 0.
    """

    grid: GridSpec
    values: np.ndarray
    constant: complex
    basepoint: tuple[int, int]
    path_defect: float = 0.0
    real_drift: float = 0.0
    half_constants: tuple[complex, complex] | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != self.grid.shape():
            raise ShapeError("potential values do not match grid shape")
        drift = float(np.max(np.abs(vals.real[self.grid.mask])))
        if drift > REAL_DRIFT_TOL:
            raise ExactnessError(
                f"potential has real drift {drift:.3e} above {REAL_DRIFT_TOL:.1e}")
        object.__setattr__(self, "values", 1j * vals.imag)
        object.__setattr__(self, "real_drift", max(drift, self.real_drift))

    @classmethod
    def from_values(cls, grid: GridSpec, values: np.ndarray,
                    basepoint: tuple[int, int] = (0, 0)) -> "Potential":
        """Wrap closed-form values; the constant is read off at the basepoint."""
        values = np.asarray(values, dtype=complex)
        values = np.broadcast_to(values, grid.shape()).copy()
        if grid.excluded_band is not None:
            values[~np.isfinite(values) & ~grid.mask] = 0.0
        return cls(grid, values, complex(values[basepoint]), basepoint)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values[self.grid.mask])))

    def min_abs(self) -> float:
        return float(np.min(np.abs(self.values[self.grid.mask])))

    def summary(self) -> dict:
        return {
            "constant": [float(self.constant.real), float(self.constant.imag)],
            "max_real_drift": float(self.real_drift),
            "path_defect": float(self.path_defect),
        }


def _check_imaginary_constant(constant: complex) -> complex:
    constant = complex(constant)
    if abs(constant.real) > REAL_DRIFT_TOL:
        raise ValueError(f"integration constant must be imaginary, got {constant}")
    return 1j * constant.imag


def _form_components(psi: Field, psi_plus: Field) -> tuple[np.ndarray, np.ndarray]:
    if psi.grid != psi_plus.grid:
        raise ShapeError("pair lives on different grids")
    p = psi.values * psi_plus.values
    return 2j * p.imag, 2j * p.real  # dx and dy components


def _l_path(a: np.ndarray, b: np.ndarray, hx: float, hy: float,
            basepoint: tuple[int, int], order: str) -> np.ndarray:
    i0, j0 = basepoint
    if order == "xy":
        leg_x = cumulative_integral(a[:, j0], hx)
        leg_y = cumulative_integral(b, hy, axis=1)
        return (leg_x - leg_x[i0])[:, None] + leg_y - leg_y[:, j0][:, None]
    leg_y = cumulative_integral(b[i0, :], hy)
    leg_x = cumulative_integral(a, hx, axis=0)
    return (leg_y - leg_y[j0])[None, :] + leg_x - leg_x[i0, :][None, :]


def omega(psi: Field, psi_plus: Field, basepoint: tuple[int, int] = (0, 0),
          constant: complex = 0.0, path: str = "xy",
          exactness_tol: float = DEFAULT_EXACTNESS_TOL) -> Potential:
    """Integrate the pair potential from ``basepoint``.

    Parameters
    ----------
    psi, psi_plus : Field
        Solutions of the direct and conjugate equations on one grid.
    basepoint : (i, j)
        Node index where the potential equals ``constant``.
    constant : complex
        Imaginary integration constant.
    path : {"xy", "yx"}
        L-path orientation used for the returned values.
    exactness_tol : float
        Maximum allowed disagreement between the two orientations.
        Larger disagreement raises ExactnessError, which signals the
        pair does not solve the equations.
    """
    constant = _check_imaginary_constant(constant)
    a, b = _form_components(psi, psi_plus)
    grid = psi.grid
    w_xy = _l_path(a, b, grid.hx, grid.hy, basepoint, "xy")
    w_yx = _l_path(a, b, grid.hx, grid.hy, basepoint, "yx")
    defect = float(np.max(np.abs((w_xy - w_yx)[grid.mask])))
    if defect > exactness_tol:
        raise ExactnessError(
            f"path-dependence defect {defect:.3e} exceeds {exactness_tol:.1e}; "
            "the pair is not a solution/conjugate-solution pair")
    vals = (w_xy if path == "xy" else w_yx) + constant
    return Potential(grid, vals, constant, basepoint, path_defect=defect)


def loop_defect(psi: Field, psi_plus: Field,
                rectangle: tuple[float, float, float, float] | None = None) -> float:
    """|closed-loop integral| of the potential form around a rectangle.

    ``rectangle`` is (x0, x1, y0, y1), snapped to grid nodes; the whole
    grid is used when omitted.  Near zero iff the pair is compatible.
    """
    a, b = _form_components(psi, psi_plus)
    grid = psi.grid
    if rectangle is None:
        i0, j0, i1, j1 = 0, 0, grid.nx - 1, grid.ny - 1
    else:
        x0, x1, y0, y1 = rectangle
        i0, j0 = grid.node_index(x0, y0)
        i1, j1 = grid.node_index(x1, y1)
    if i1 - i0 < 3 or j1 - j0 < 3:
        raise ValueError("rectangle must span at least 4 nodes per side")
    bottom = integral(a[i0:i1 + 1, j0], grid.hx)
    top = integral(a[i0:i1 + 1, j1], grid.hx)
    right = integral(b[i1, j0:j1 + 1], grid.hy)
    left = integral(b[i0, j0:j1 + 1], grid.hy)
    return float(abs(bottom + right - top - left))


def omega_singular(f: "SingularFieldModel", f_plus: "SingularFieldModel",
                   constant: complex = 0.0) -> Potential:
    """Potential of a seed pair with 1/x leading behavior.

    The product of the leading terms integrates in closed form to
    2i*b(y)/x with b = product of the leading coefficients; only the
    remainder, which is bounded across the contour for a genuine pair,
    is integrated numerically.  Integrating the remainder over the
    whole strip keeps one shared constant on both sides of the contour;
    the values at a reference node of each half are recorded in
    ``half_constants``.

    Raises PositivityError when b is not strictly positive on the
    contour interval.
    """
    constant = _check_imaginary_constant(constant)
    grid = f.grid
    if f_plus.grid != grid:
        raise ShapeError("seed models live on different grids")
    if grid.excluded_band is None:
        raise ValueError("singular potentials need a grid with an excluded band")

    ys = grid.ys
    b = (f.leading * f_plus.leading).real_part()
    bv = b.values_on(ys)
    if np.min(bv) <= 0.0:
        raise PositivityError(
            f"product of leading coefficients must be positive, min {np.min(bv):.3e}")
    bpv = b.deriv().values_on(ys)

    x = grid.x
    with np.errstate(divide="ignore", invalid="ignore"):
        w_lead = 2j * bv[None, :] / x
        p_model = -1j * bv[None, :] / x ** 2 + bpv[None, :] / x
    p_act = f.evaluate().values * f_plus.evaluate().values
    p_rem = p_act - p_model
    bad = ~np.isfinite(p_rem)
    if np.any(bad & grid.mask):
        raise ValueError("seed product is non-finite at active nodes")
    # for a genuine pair the remainder is bounded across the contour;
    # a node exactly on it is filled by cubic interpolation so the
    # crossing x-leg keeps its order
    for i, j in zip(*np.nonzero(bad)):
        if 2 <= i < grid.nx - 2 and np.all(np.isfinite(
                p_rem[[i - 2, i - 1, i + 1, i + 2], j])):
            p_rem[i, j] = (-p_rem[i - 2, j] + 4 * p_rem[i - 1, j]
                           + 4 * p_rem[i + 1, j] - p_rem[i + 2, j]) / 6.0
        else:
            p_rem[i, j] = 0.0
    w_lead[~np.isfinite(w_lead)] = 0.0

    # the remainder form is integrated over the whole strip so both
    # halves share one constant; the per-half values are reported
    a_c = 2j * p_rem.imag
    b_c = 2j * p_rem.real
    bp_index = (grid.nx - 1, 0)
    w_xy = _l_path(a_c, b_c, grid.hx, grid.hy, bp_index, "xy")
    w_yx = _l_path(a_c, b_c, grid.hx, grid.hy, bp_index, "yx")
    defect = float(np.max(np.abs((w_xy - w_yx)[grid.mask])))
    vals = w_xy + w_lead + constant
    halves = []
    right = np.nonzero(grid.xs > 0)[0]
    left = np.nonzero(grid.xs < 0)[0]
    for cols, ref in ((right, -1), (left, 0)):
        if cols.size:
            halves.append(complex(vals[cols[ref], 0]))
    return Potential(grid, vals, complex(vals[bp_index]), bp_index,
                     path_defect=defect,
                     half_constants=tuple(halves) if halves else None)
