import numpy as np
import pytest

from hsdiff import Field, Grid1D, MetricSpec, MultiplierOp, SpectralField, spectral
from hsdiff.errors import (
    HomogeneousNonzeroMean,
    KernelUnresolved,
    NonHermitianInput,
    SymbolSingularAtZero,
)

RNG = np.random.default_rng(20240817)


def random_field(grid, max_mode=None, zero_mean=False, rng=RNG):
    """Band-limited random trigonometric field."""
    n = grid.n_points
    if max_mode is None:
        max_mode = n // 3
    x = grid.nodes
    vals = np.zeros(n)
    for k in range(1, max_mode + 1):
        a, b = rng.standard_normal(2) / (1 + k)
        vals += a * np.cos(2 * np.pi * k * x / grid.length)
        vals += b * np.sin(2 * np.pi * k * x / grid.length)
    if not zero_mean:
        vals += rng.standard_normal()
    return Field(grid, vals)


class TestGrid:
    def test_nodes_properties(self):
        g = Grid1D(64, 2 * np.pi)
        assert g.nodes[0] == 0.0
        assert np.allclose(np.diff(g.nodes), g.spacing)
        assert len(g.wavenumbers) == 64

    def test_wavenumbers_symmetric_up_to_nyquist(self):
        g = Grid1D(16, 4.0)
        xi = g.wavenumbers
        # every nonzero |xi| below Nyquist appears with both signs
        pos = sorted(x for x in xi if 0 < x < np.max(np.abs(xi)))
        neg = sorted(-x for x in xi if -np.max(np.abs(xi)) < x < 0)
        assert np.allclose(pos, neg)
        assert np.isclose(np.max(xi), 2 * np.pi * 8 / 4.0)

    def test_invalid_grid(self):
        with pytest.raises(ValueError):
            Grid1D(1, 1.0)
        with pytest.raises(ValueError):
            Grid1D(8, -1.0)


class TestTransforms:
    def test_constant_field_dc_only(self):
        g = Grid1D(128, 5.0)
        sf = spectral.forward(Field(g, np.ones(128)))
        assert abs(sf.coeffs[0]) > 0
        assert np.max(np.abs(sf.coeffs[1:])) < 1e-14

    def test_cosine_two_modes(self):
        g = Grid1D(128, 2 * np.pi)
        k = 5
        sf = spectral.forward(Field(g, np.cos(k * g.nodes)))
        mags = np.abs(sf.coeffs)
        hot = np.argsort(mags)[-2:]
        assert set(hot) == {k, 128 - k}
        assert np.isclose(mags[k], mags[128 - k])

    def test_parseval_random(self):
        g = Grid1D(256, 3.0)
        f = random_field(g)
        sf = spectral.forward(f)
        lhs = np.sum(f.values ** 2)
        rhs = np.sum(np.abs(sf.coeffs) ** 2)
        assert abs(lhs - rhs) < 1e-12 * max(1.0, lhs)

    def test_roundtrip(self):
        g = Grid1D(200, 1.0)
        f = random_field(g, max_mode=60)
        back = spectral.inverse(spectral.forward(f))
        err = np.linalg.norm(back.values - f.values) / np.linalg.norm(f.values)
        assert err < 1e-12

    def test_inverse_zero(self):
        g = Grid1D(32, 1.0)
        out = spectral.inverse(SpectralField(g, np.zeros(32, dtype=complex)))
        assert np.all(out.values == 0.0)

    def test_inverse_rejects_non_hermitian(self):
        g = Grid1D(32, 1.0)
        c = np.zeros(32, dtype=complex)
        c[3] = 1.0  # missing the conjugate partner at -3
        with pytest.raises(NonHermitianInput):
            spectral.inverse(SpectralField(g, c))


class TestMultipliers:
    def test_identity_symbol(self):
        g = Grid1D(64, 2 * np.pi)
        f = random_field(g)
        op = MultiplierOp(lambda xi: np.ones_like(xi), "one")
        out = spectral.apply_multiplier(op, f)
        assert np.max(np.abs(out.values - f.values)) < 1e-12

    def test_derivative_sin_to_cos(self):
        g = Grid1D(128, 2 * np.pi)
        f = Field(g, np.sin(g.nodes))
        out = spectral.derivative(f)
        assert np.max(np.abs(out.values - np.cos(g.nodes))) < 1e-10

    def test_inertia_on_cosine(self):
        # hand evaluation: A_1 cos(kx) = (1 + k^2) cos(kx)
        g = Grid1D(128, 2 * np.pi)
        k = 3
        f = Field(g, np.cos(k * g.nodes))
        out = spectral.apply_multiplier(
            spectral.inertia_operator(MetricSpec(1.0, "hs")), f
        )
        assert np.max(np.abs(out.values - (1 + k ** 2) * f.values)) < 1e-10

    def test_multipliers_commute(self):
        g = Grid1D(128, 2 * np.pi)
        f = random_field(g)
        a = spectral.inertia_operator(MetricSpec(0.7, "hs"))
        b = spectral.inertia_operator(MetricSpec(1.3, "hsbar"))
        ab = spectral.apply_multiplier(a, spectral.apply_multiplier(b, f))
        ba = spectral.apply_multiplier(b, spectral.apply_multiplier(a, f))
        scale = np.max(np.abs(ab.values))
        assert np.max(np.abs(ab.values - ba.values)) < 1e-12 * max(1.0, scale)

    def test_translation_equivariance(self):
        g = Grid1D(128, 2 * np.pi)
        f = random_field(g)
        op = spectral.inertia_operator(MetricSpec(0.5, "hs"))
        shift = 17
        shifted_then_op = spectral.apply_multiplier(
            op, Field(g, np.roll(f.values, shift))
        )
        op_then_shifted = np.roll(spectral.apply_multiplier(op, f).values, shift)
        scale = max(1.0, np.max(np.abs(op_then_shifted)))
        assert np.max(np.abs(shifted_then_op.values - op_then_shifted)) < 1e-12 * scale

    def test_real_symbols_self_adjoint(self):
        g = Grid1D(128, 2 * np.pi)
        f, h = random_field(g), random_field(g)
        op = spectral.inertia_operator(MetricSpec(0.75, "hsbar"))
        lhs = np.sum(spectral.apply_multiplier(op, f).values * h.values)
        rhs = np.sum(f.values * spectral.apply_multiplier(op, h).values)
        assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs))

    def test_singular_homogeneous_symbol_rejected(self):
        g = Grid1D(32, 2 * np.pi)
        f = random_field(g)
        bad = MultiplierOp(
            lambda xi: np.divide(1.0, xi, out=np.full_like(xi, np.inf),
                                 where=xi != 0),
            "1/xi",
        )
        with pytest.raises(SymbolSingularAtZero):
            spectral.apply_multiplier(bad, f)


class TestHilbert:
    def test_cos_to_sin(self):
        g = Grid1D(128, 2 * np.pi)
        for k in (1, 4, 9):
            out = spectral.hilbert(Field(g, np.cos(k * g.nodes)))
            assert np.max(np.abs(out.values - np.sin(k * g.nodes))) < 1e-10

    def test_constant_to_zero(self):
        g = Grid1D(64, 2 * np.pi)
        out = spectral.hilbert(Field(g, 3.7 * np.ones(64)))
        assert np.max(np.abs(out.values)) < 1e-13

    def test_involution(self):
        g = Grid1D(256, 2 * np.pi)
        f = random_field(g)
        hh = spectral.hilbert(spectral.hilbert(f))
        target = -(f.values - f.mean())
        assert np.max(np.abs(hh.values - target)) < 1e-10


class TestMollify:
    def test_constant_preserved(self):
        g = Grid1D(256, 2 * np.pi)
        out = spectral.mollify(Field(g, 2.5 * np.ones(256)), 0.2)
        assert np.max(np.abs(out.values - 2.5)) < 1e-12

    def test_mean_preserved(self):
        g = Grid1D(256, 2 * np.pi)
        f = random_field(g)
        out = spectral.mollify(f, 0.15)
        assert abs(out.mean() - f.mean()) < 1e-12

    def test_smooths_in_hs(self):
        g = Grid1D(512, 2 * np.pi)
        from hsdiff import norms

        f = random_field(g)
        out = spectral.mollify(f, 0.1)
        spec = MetricSpec(0.5, "hs")
        assert norms.norm(spec, out) <= norms.norm(spec, f) + 1e-12

    def test_indicator_l1_convergence(self):
        # quadrature oracle: h * sum |mollified - indicator| shrinks with eps
        g = Grid1D(4096, 8.0)
        x = g.nodes
        ind = Field(g, ((x >= 3.0) & (x <= 5.0)).astype(float))
        h = g.spacing
        dists = []
        for eps in (0.4, 0.2, 0.1, 0.05):
            m = spectral.mollify(ind, eps)
            dists.append(h * np.sum(np.abs(m.values - ind.values)))
        assert all(b < a for a, b in zip(dists, dists[1:]))
        # mass near the two jumps scales like eps
        assert dists[-1] < 0.1

    def test_unresolved_kernel_rejected(self):
        g = Grid1D(64, 2 * np.pi)
        with pytest.raises(KernelUnresolved):
            spectral.mollify(Field(g, np.ones(64)), 0.5 * g.spacing)


class TestInertiaPair:
    @pytest.mark.parametrize("variant,s", [
        ("hs", 0.5), ("hs", 1.5), ("hsbar", 0.5), ("hsbar", 2.0),
    ])
    def test_inverse_roundtrip(self, variant, s):
        g = Grid1D(128, 2 * np.pi)
        f = random_field(g)
        spec = MetricSpec(s, variant)
        out = spectral.apply_multiplier(
            spectral.inertia_inverse(spec),
            spectral.apply_multiplier(spectral.inertia_operator(spec), f),
        )
        assert np.max(np.abs(out.values - f.values)) < 1e-10

    def test_homogeneous_roundtrip_zero_mean(self):
        g = Grid1D(128, 2 * np.pi)
        f = random_field(g, zero_mean=True)
        spec = MetricSpec(0.5, "homogeneous")
        out = spectral.apply_multiplier(
            spectral.inertia_inverse(spec),
            spectral.apply_multiplier(spectral.inertia_operator(spec), f),
        )
        assert np.max(np.abs(out.values - f.values)) < 1e-10

    def test_homogeneous_inverse_rejects_mean(self):
        g = Grid1D(64, 2 * np.pi)
        f = Field(g, 1.0 + np.cos(g.nodes))
        with pytest.raises(HomogeneousNonzeroMean):
            spectral.apply_multiplier(
                spectral.inertia_inverse(MetricSpec(0.5, "homogeneous")), f
            )

    def test_s_zero_is_identity(self):
        g = Grid1D(64, 2 * np.pi)
        f = random_field(g)
        for variant in ("hs", "hsbar"):
            out = spectral.apply_multiplier(
                spectral.inertia_operator(MetricSpec(0.0, variant)), f
            )
            assert np.max(np.abs(out.values - f.values)) < 1e-13

    def test_half_homogeneous_is_hilbert_derivative(self):
        # |xi| multiplier equals H d/dx: on cos(kx) both give k cos(kx)
        g = Grid1D(128, 2 * np.pi)
        k = 4
        f = Field(g, np.cos(k * g.nodes))
        spec = MetricSpec(0.5, "homogeneous")
        via_multiplier = spectral.apply_multiplier(spectral.inertia_operator(spec), f)
        via_hd = spectral.hilbert(spectral.derivative(f))
        assert np.max(np.abs(via_multiplier.values - k * f.values)) < 1e-10
        assert np.max(np.abs(via_multiplier.values - via_hd.values)) < 1e-10
