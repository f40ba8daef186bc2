import random

import pytest

from galtrees.cyclo import (
    CycElem,
    FieldConfig,
    congruent,
    galois_apply,
    padic_exp,
    padic_log,
    sigma_eigenvector,
    smallest_primitive_root,
    teichmuller,
    valuation,
)
from galtrees.errors import NotAUnit
from galtrees.units import (
    QuotientLevel,
    TauContext,
    chi,
    chi_prime,
    ker_chi_basis,
    materialize_unit,
    quotient_level,
    rho,
    split_unit,
)

F7 = FieldConfig(7, 30)


def rand_unit(field, rng):
    while True:
        x = CycElem(field, [rng.randrange(field.coeff_mod) for _ in range(field.d)])
        if x.is_unit():
            return x


class TestSplitUnit:
    def test_omega(self):
        c = split_unit(teichmuller(F7))
        assert (c.a, c.b) == (1, 0) and c.xi.is_zero()

    def test_zeta(self):
        c = split_unit(CycElem.zeta(F7))
        assert (c.a, c.b) == (0, 1)
        assert valuation(c.xi) is None

    def test_one_plus_pi_squared(self):
        u = CycElem.one(F7) + CycElem.pi(F7).pow(2)
        c = split_unit(u)
        assert (c.a, c.b) == (0, 0)
        assert congruent(c.xi, padic_log(u))

    def test_nonunit_rejected(self):
        with pytest.raises(NotAUnit):
            split_unit(CycElem.pi(F7))

    def test_roundtrip_random(self):
        rng = random.Random(3)
        for _ in range(200):
            u = rand_unit(F7, rng)
            assert congruent(materialize_unit(F7, split_unit(u)), u)

    def test_coord_roundtrip(self):
        rng = random.Random(5)
        pi2 = CycElem.pi(F7).pow(2)
        for _ in range(20):
            xi = CycElem(F7, [rng.randrange(F7.coeff_mod) for _ in range(6)]) * pi2
            u = materialize_unit(F7, split_unit(materialize_unit(
                F7, type(split_unit(teichmuller(F7)))(
                    rng.randrange(6), rng.randrange(7), xi))))
            c = split_unit(u)
            assert congruent(materialize_unit(F7, c), u)


class TestRho:
    def test_zeta_twists_to_one(self):
        z = CycElem.zeta(F7)
        for i in (2, 3):
            assert congruent(rho(i, z), CycElem.one(F7))

    def test_omega_fixed(self):
        w = teichmuller(F7)
        assert congruent(rho(2, w), w)

    def test_matches_direct_formula(self):
        rng = random.Random(7)
        for _ in range(20):
            u = rand_unit(F7, rng)
            for i in (2, 3):
                direct = u.invert() * galois_apply(i, u) * galois_apply((1 - i) % 7, u)
                assert congruent(rho(i, u), direct)

    def test_multiplicative(self):
        rng = random.Random(11)
        for _ in range(100):
            u, v = rand_unit(F7, rng), rand_unit(F7, rng)
            assert congruent(rho(2, u * v), rho(2, u) * rho(2, v))

    def test_index_bounds(self):
        with pytest.raises(ValueError):
            rho(1, teichmuller(F7))
        with pytest.raises(ValueError):
            rho(F7.ell + 2, teichmuller(F7))


class TestChi:
    def test_omega_in_kernel(self):
        ctx = TauContext(F7, 2)
        assert congruent(chi(teichmuller(F7), ctx), CycElem.one(F7))

    def test_zeta_value(self):
        ctx = TauContext(F7, 2)
        i_tau = pow(smallest_primitive_root(7), 2, 7)
        z = CycElem.zeta(F7)
        assert congruent(chi(z, ctx), z.pow((1 - i_tau) % 7))

    def test_homomorphism(self):
        ctx = TauContext(F7, 3)
        rng = random.Random(13)
        for _ in range(25):
            u, v = rand_unit(F7, rng), rand_unit(F7, rng)
            assert congruent(chi(u * v, ctx), chi(u, ctx) * chi(v, ctx))

    def test_chi_prime_is_refined_chi(self):
        ctx = TauContext(F7, 2)
        rng = random.Random(17)
        u = rand_unit(F7, rng)
        assert congruent(chi_prime(u, ctx, 2), chi(u, TauContext(F7, 1)))

    def test_kernel_of_chi_prime_inside_kernel_of_chi(self):
        # nu^a = tau, so a nu-fixed unit is tau-fixed
        ctx = TauContext(F7, 2)
        for coord in ker_chi_basis(ctx.refine(2)):
            u = materialize_unit(F7, coord)
            assert congruent(chi(u, ctx), CycElem.one(F7))


class TestKerChiBasis:
    @pytest.mark.parametrize("k", [1, 2, 3, 6])
    def test_rank_is_k(self, k):
        ctx = TauContext(F7, k)
        basis = ker_chi_basis(ctx)
        assert len(basis) - 1 == k  # omega listed first

    @pytest.mark.parametrize("k", [1, 2, 3, 6])
    def test_members_are_tau_fixed(self, k):
        ctx = TauContext(F7, k)
        for coord in ker_chi_basis(ctx):
            u = materialize_unit(F7, coord)
            assert congruent(chi(u, ctx), CycElem.one(F7))
            assert congruent(ctx.apply(u), u)

    def test_h_equals_d_gives_padic_units(self):
        # k=1: kernel meets U_2 in 1 + pZ_p, a single generator
        ctx = TauContext(F7, 1)
        basis = ker_chi_basis(ctx)
        assert len(basis) == 2
        xi = basis[1].xi
        assert valuation(xi) == F7.d  # log(1 + pZ_p) = pZ_p = pi^d Z_p up to units


class TestQuotientLevel:
    def test_p7_n11(self):
        ql = quotient_level(F7, 11, 5)
        assert isinstance(ql, QuotientLevel)
        assert ql.level == 6
        assert ql.digit_positions == (2, 3, 4, 5)

    def test_returned_level_trivial_and_minimal(self):
        from galtrees.units import _acts_trivially

        ql = quotient_level(F7, 11, 3)
        assert _acts_trivially(F7, padic_exp(sigma_eigenvector(F7, ql.level)), 3)
        if ql.level > 2:
            assert not _acts_trivially(
                F7, padic_exp(sigma_eigenvector(F7, ql.level - 1)), 3
            )
