import numpy as np
import pytest

from galab.errors import ExactnessError
from galab.grid import diff_axis
from galab.potential import Potential, loop_defect, omega

from conftest import make_grid, ones, sample, zeros


def grid_with_origin():
    # contains the reference point z = 0 so constants can be read there
    return make_grid(65, 65, x=(0.0, 1.0), y=(0.0, 1.0))


class TestOmega:
    def test_unit_pair_gives_2iy(self):
        g = grid_with_origin()
        pot = omega(ones(g), ones(g), basepoint=(0, 0), constant=0.0)
        assert np.max(np.abs(pot.values - 2j * g.y)) < 1e-12

    def test_zero_psi_is_constant(self, strip):
        pot = omega(zeros(strip), sample(strip, lambda z: z ** 2),
                    constant=0.5j)
        assert np.max(np.abs(pot.values - 0.5j)) == 0.0

    def test_z_one_pair_gives_2ixy(self):
        g = grid_with_origin()
        pot = omega(sample(g, lambda z: z), ones(g), (0, 0), 0.0)
        assert np.max(np.abs(pot.values - 2j * g.x * g.y)) < 1e-12

    def test_defining_relations(self, strip):
        # dw/dz = psi*psi+ and dw/dzbar = -conj(psi*psi+) at stencil order
        psi = sample(strip, lambda z: np.exp(z / 2))
        pot = omega(psi, ones(strip))
        p = psi.values
        fx = diff_axis(pot.values, strip.hx, axis=0)
        fy = diff_axis(pot.values, strip.hy, axis=1)
        d_z = 0.5 * (fx - 1j * fy)
        d_zb = 0.5 * (fx + 1j * fy)
        assert np.max(np.abs(d_z - p)) < 1e-7
        assert np.max(np.abs(d_zb + np.conj(p))) < 1e-7

    def test_defining_relations_converge(self):
        errs = []
        for n in (32, 64, 128):
            g = make_grid(n, n)
            psi = sample(g, lambda z: np.exp(z / 2))
            pot = omega(psi, ones(g))
            fx = diff_axis(pot.values, g.hx, axis=0)
            fy = diff_axis(pot.values, g.hy, axis=1)
            errs.append(float(np.max(np.abs(0.5 * (fx - 1j * fy) - psi.values))))
        order = np.log2(errs[0] / errs[1])
        assert order > 3.5, errs

    def test_path_orientations_agree(self, strip):
        psi = sample(strip, lambda z: np.exp(z / 2))
        a = omega(psi, ones(strip), path="xy")
        b = omega(psi, ones(strip), path="yx")
        assert np.max(np.abs(a.values - b.values)) < 1e-9

    def test_incompatible_pair_rejected(self, strip):
        with pytest.raises(ExactnessError):
            omega(sample(strip, np.conj), ones(strip))

    def test_real_scaling_bilinearity(self, strip):
        psi = sample(strip, lambda z: z)
        base = omega(psi, ones(strip), constant=0.0)
        scaled = omega(3.0 * psi, ones(strip), constant=0.0)
        assert np.max(np.abs(scaled.values - 3.0 * base.values)) < 1e-10

    def test_constant_must_be_imaginary(self, strip):
        with pytest.raises(ValueError):
            omega(ones(strip), ones(strip), constant=1.0 + 0j)

    def test_constant_at_basepoint(self, strip):
        pot = omega(ones(strip), ones(strip), basepoint=(3, 7), constant=4j)
        assert pot.values[3, 7] == 4j
        assert pot.constant == 4j

    def test_summary_keys(self, strip):
        summary = omega(ones(strip), ones(strip)).summary()
        assert set(summary) == {"constant", "max_real_drift", "path_defect"}


class TestPotentialType:
    def test_real_drift_rejected(self, strip):
        with pytest.raises(ExactnessError):
            Potential(strip, np.full(strip.shape(), 1.0 + 1j), 0j, (0, 0))

    def test_projection_to_imaginary(self, strip):
        vals = 2j * strip.y + 1e-13
        pot = Potential(strip, vals, 2j, (0, 0))
        assert np.max(np.abs(pot.values.real)) == 0.0

    def test_from_values_reads_constant(self, strip):
        pot = Potential.from_values(strip, 2j * strip.y, basepoint=(0, 0))
        assert pot.constant == 2j * strip.ys[0]


class TestLoopDefect:
    def test_exact_pair_closes(self, strip):
        assert loop_defect(ones(strip), ones(strip)) < 1e-12

    def test_polynomial_pair_closes(self, strip):
        assert loop_defect(sample(strip, lambda z: z), ones(strip)) < 1e-12

    def test_incompatible_pair_defect_matches_riemann_oracle(self):
        # oracle: dense Riemann sum of the curl of the form over the
        # rectangle (Green's theorem), on a refined grid
        g = make_grid(96, 96)
        psi, psi_plus = sample(g, np.conj), ones(g)
        defect = loop_defect(psi, psi_plus)

        fine = make_grid(768, 768)
        p = np.conj(fine.z)
        a = 2j * p.imag
        b = 2j * p.real
        curl = (np.gradient(b, fine.hx, axis=0)
                - np.gradient(a, fine.hy, axis=1))
        cell = fine.hx * fine.hy
        oracle = abs(np.sum(curl[:-1, :-1]) * cell)
        assert defect == pytest.approx(oracle, rel=5e-3)
        assert defect == pytest.approx(4.0, abs=1e-9)  # 4 * area, area = 1

    def test_sub_rectangle(self, strip):
        d = loop_defect(sample(strip, np.conj), ones(strip),
                        rectangle=(0.25, 0.75, 1.25, 1.75))
        i0, j0 = strip.node_index(0.25, 1.25)
        i1, j1 = strip.node_index(0.75, 1.75)
        area = (strip.xs[i1] - strip.xs[i0]) * (strip.ys[j1] - strip.ys[j0])
        assert d == pytest.approx(4.0 * area, abs=1e-9)
