"""The unit group U = <omega> x <zeta> x U_2 in split coordinates.

U_2 = 1 + pi^2 is linearized through the p-adic logarithm, so most unit
algebra reduces to additive work on log-coordinates.  The twist maps
rho_i(u) = u^-1 sigma_i(u) sigma_{1-i}(u) drive the action on parameter
tuples; chi(u) = u tau(u)^-1 splits U into kernel and image parts.
"""

from dataclasses import dataclass
from functools import lru_cache

from .cyclo import (
    CycElem,
    FieldConfig,
    galois_apply,
    galois_power_apply,
    padic_exp,
    padic_log,
    pi_digits,
    sigma_eigenvector,
    smallest_primitive_root,
    teichmuller,
    valuation,
)
from .errors import NotAUnit, PrecisionExhausted


@lru_cache(maxsize=None)
def _dlog_table(p: int):
    g = smallest_primitive_root(p)
    table = {}
    x = 1
    for e in range(p - 1):
        table[x] = e
        x = x * g % p
    return table


def discrete_log(field: FieldConfig, r: int) -> int:
    """Exponent e with g^e = r mod p for the fixed primitive root g."""
    return _dlog_table(field.p)[r % field.p]


@dataclass(frozen=True)
class TauContext:
    """A chosen Galois subgroup generator tau = sigma^k, of order h = d/k."""

    field: FieldConfig
    k: int

    def __post_init__(self):
        if self.field.d % self.k != 0:
            raise ValueError("k must divide d")

    @property
    def h(self) -> int:
        return self.field.d // self.k

    def refine(self, a: int) -> "TauContext":
        """The context for nu = sigma^(k/a) with nu^a = tau; a divides k."""
        if a < 1 or self.k % a != 0:
            raise ValueError("a must divide k")
        return TauContext(self.field, self.k // a)

    def apply(self, x: CycElem) -> CycElem:
        return galois_power_apply(self.k, x)


@dataclass(frozen=True)
class UnitCoord:
    """A unit written as omega^a * zeta^b * exp(xi) with v(xi) >= 2."""

    a: int
    b: int
    xi: CycElem


@dataclass(frozen=True)
class QuotientLevel:
    """Depth J at which U_J = 1 + pi^J acts trivially on all layers in play.

    digit_positions lists the pi-power digit positions spanning pi^2/pi^J.
    """

    level: int
    digit_positions: tuple


def split_unit(u: CycElem) -> UnitCoord:
    """Split coordinates of a unit; inverse of materialize_unit."""
    if not u.is_unit():
        raise NotAUnit("element lies in the maximal ideal")
    f = u.field
    a = discrete_log(f, u.residue())
    w = teichmuller(f)
    u1 = u * w.pow((f.d - a) % f.d)
    b = pi_digits(u1 - CycElem.one(f), 2)[1]
    u2 = u1 * CycElem.zeta(f).pow((f.p - b) % f.p)
    return UnitCoord(a, b, padic_log(u2))


def materialize_unit(field: FieldConfig, coord: UnitCoord) -> CycElem:
    w = teichmuller(field)
    return (
        w.pow(coord.a % field.d)
        * CycElem.zeta(field).pow(coord.b % field.p)
        * padic_exp(coord.xi)
    )


def rho(i: int, u: CycElem) -> CycElem:
    """The twist u^-1 sigma_i(u) sigma_{1-i}(u) for 2 <= i <= ell+1."""
    f = u.field
    if not (2 <= i <= f.ell + 1):
        raise ValueError(f"twist index {i} outside 2..{f.ell + 1}")
    if not u.is_unit():
        raise NotAUnit("twist requires a unit")
    return u.invert() * galois_apply(i, u) * galois_apply((1 - i) % f.p, u)


def chi(u: CycElem, ctx: TauContext) -> CycElem:
    """The homomorphism u -> u tau(u)^-1."""
    if not u.is_unit():
        raise NotAUnit("chi requires a unit")
    return u * ctx.apply(u).invert()


def chi_prime(u: CycElem, ctx: TauContext, a: int) -> CycElem:
    """chi for the refined generator nu with nu^a = tau."""
    return chi(u, ctx.refine(a))


def ker_chi_basis(ctx: TauContext):
    """omega together with exp of a Z_p-basis of the tau-fixed part of pi^2.

    The fixed space F decomposes along sigma-eigenvectors a_m with
    tau(a_m) = omega^(k m) a_m, so F is spanned by the a_m with h | m in
    one window of d consecutive valuations; there are exactly k of them.
    """
    f = ctx.field
    gens = [UnitCoord(1, 0, CycElem.zero(f))]
    count = 0
    for m in range(2, f.d + 2):
        if (ctx.k * m) % f.d == 0:
            gens.append(UnitCoord(0, 0, sigma_eigenvector(f, m)))
            count += 1
    if count != ctx.k:
        from .errors import InternalInconsistency

        raise InternalInconsistency(
            f"tau-fixed space has rank {count}, expected {ctx.k}"
        )
    return gens


def _acts_trivially(field: FieldConfig, u: CycElem, e_max: int) -> bool:
    """Whether (u, 1) fixes Gamma_n / Gamma_{n+e_max+1} pointwise.

    In the diagonal model the coordinate-wise change is (rho_i(u)^-1 - 1) x_j
    with x_j running over pi^(n-2j); triviality reduces to
    v(rho_i(u) - 1) >= e_max + 1 for every twist index.
    """
    one = CycElem.one(field)
    for i in range(2, field.ell + 2):
        v = valuation(rho(i, u) - one)
        if v is not None and v < e_max + 1:
            return False
    return True


def quotient_level(field: FieldConfig, n: int, e_max: int) -> QuotientLevel:
    """Smallest J >= 2 with U_J acting trivially on all layers up to e_max."""
    def level_trivial(j):
        for v in range(j, j + field.d):
            if v > field.prec - field.d:
                raise PrecisionExhausted(
                    "quotient level search exceeded working precision"
                )
            if not _acts_trivially(field, padic_exp(sigma_eigenvector(field, v)), e_max):
                return False
        return True

    j = max(2, e_max + 1)
    while not level_trivial(j):
        j += 1
    return QuotientLevel(j, tuple(range(2, j)))
