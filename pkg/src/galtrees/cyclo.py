"""Exact arithmetic in Z_p[zeta] at fixed pi-adic precision.

Here zeta is a primitive p-th root of unity over Q_p and pi = zeta - 1
generates the maximal ideal of the ring of integers.  Elements are stored
as coefficient vectors of degree < p-1 in the zeta-power basis, with
integer coefficients reduced mod p^N.  Such a vector pins the element down
modulo pi^(N*(p-1)), comfortably beyond the working pi-precision M.

The residue map zeta -> 1 sends an element to F_p; an element lies in the
maximal ideal exactly when its residue vanishes.  Valuations are computed
by an exact integer division chain by pi, which never loses digits below
the coefficient modulus.
"""

from dataclasses import dataclass
from functools import lru_cache

from .errors import (
    DomainError,
    EigenvectorNotFound,
    InvalidIndex,
    NotAUnit,
)


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    f = 2
    while f * f <= m:
        if m % f == 0:
            return False
        f += 1
    return True


@lru_cache(maxsize=None)
def smallest_primitive_root(p: int) -> int:
    """Smallest generator of F_p^*, used to fix the Galois generator."""
    d = p - 1
    primes = []
    m = d
    f = 2
    while f * f <= m:
        if m % f == 0:
            primes.append(f)
            while m % f == 0:
                m //= f
        f += 1
    if m > 1:
        primes.append(m)
    for g in range(2, p):
        if all(pow(g, d // q, p) != 1 for q in primes):
            return g
    raise ValueError(f"no primitive root mod {p}")


@dataclass(frozen=True)
class FieldConfig:
    """Numeric parameters of one working field Q_p(zeta).

    prec is the pi-adic precision M every element is trusted to; coeff_exp
    is the exponent N of the coefficient modulus p^N with N = ceil(M/d)+2.
    The two spare p-digits absorb the division by p that eigen-coordinate
    extraction and the p-adic series perform internally.
    """

    p: int
    prec: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.p < 7:
            raise ValueError("only primes p >= 7 are supported")
        if self.prec < 1:
            raise ValueError("precision must be positive")

    @property
    def d(self) -> int:
        return self.p - 1

    @property
    def ell(self) -> int:
        return (self.p - 3) // 2

    @property
    def c(self) -> int:
        return 2 * self.p - 8

    @property
    def coeff_exp(self) -> int:
        return -(-self.prec // self.d) + 2

    @property
    def coeff_mod(self) -> int:
        return self.p ** self.coeff_exp

    @classmethod
    def for_session(cls, p: int, n: int) -> "FieldConfig":
        """Precision covering all congruences mod Gamma_{n+e+1}, e <= n-c,
        plus slack for the multiplication-by-p periodicity maps."""
        c = 2 * p - 8
        return cls(p, n + (n - c) + (p - 1) + 4)


class CycElem:
    """One element of Z_p[zeta], immutable after construction."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldConfig, coeffs):
        q = field.coeff_mod
        self.field = field
        self.coeffs = tuple(c % q for c in coeffs)
        if len(self.coeffs) != field.d:
            raise ValueError("coefficient vector has wrong length")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, field):
        return cls(field, (0,) * field.d)

    @classmethod
    def one(cls, field):
        return cls(field, (1,) + (0,) * (field.d - 1))

    @classmethod
    def from_int(cls, field, value):
        return cls(field, (value,) + (0,) * (field.d - 1))

    @classmethod
    def zeta(cls, field):
        return cls(field, (0, 1) + (0,) * (field.d - 2))

    @classmethod
    def pi(cls, field):
        return cls(field, (-1, 1) + (0,) * (field.d - 2))

    # -- basic predicates --------------------------------------------------

    def residue(self) -> int:
        """Image in F_p under zeta -> 1."""
        return sum(self.coeffs) % self.field.p

    def is_unit(self) -> bool:
        return self.residue() != 0

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def constant_value(self) -> int:
        """The element as an integer mod p^N; requires it to lie in Z_p."""
        if any(c != 0 for c in self.coeffs[1:]):
            raise ValueError("element is not a p-adic integer constant")
        return self.coeffs[0]

    # -- ring structure ----------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, CycElem)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field.p, self.coeffs))

    def __add__(self, other):
        return CycElem(
            self.field, [a + b for a, b in zip(self.coeffs, other.coeffs)]
        )

    def __sub__(self, other):
        return CycElem(
            self.field, [a - b for a, b in zip(self.coeffs, other.coeffs)]
        )

    def __neg__(self):
        return CycElem(self.field, [-a for a in self.coeffs])

    def scale(self, k: int):
        return CycElem(self.field, [k * a for a in self.coeffs])

    def __mul__(self, other):
        f = self.field
        return CycElem(f, _mul_vec(self.coeffs, other.coeffs, f.p, f.coeff_mod))

    def pow(self, e: int):
        if e < 0:
            return self.invert().pow(-e)
        r = CycElem.one(self.field)
        b = self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def invert(self):
        """Inverse of a unit, via Lagrange in (O/p^N O)^*."""
        if not self.is_unit():
            raise NotAUnit("cannot invert an element of the maximal ideal")
        f = self.field
        order = f.p ** (f.coeff_exp * f.d - 1) * (f.p - 1)
        return self.pow(order - 1)

    def __repr__(self):
        return f"CycElem(p={self.field.p}, {list(self.coeffs)})"


def _mul_vec(a, b, p, q):
    """Product in Z[zeta]/(Phi_p, p^N), using zeta^p = 1 for the fold."""
    d = p - 1
    acc = [0] * p
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            k = i + j
            if k >= p:
                k -= p
            acc[k] += ai * bj
    top = acc[d]
    return [(acc[i] - top) % q for i in range(d)]


# -- valuation and digits ----------------------------------------------------


def _exact_div_pi(f, p):
    """Divide a degree <p-1 integer polynomial with f(1) = 0 mod p by
    (X - 1), exactly over Z, inside Z[X]/(Phi_p)."""
    t = sum(f) // p
    # subtract t*Phi_p so the polynomial vanishes at 1 exactly, then do
    # synthetic division; ft has degree p-1 with top coefficient -t
    ft = [c - t for c in f] + [-t]
    d = p - 1
    q = [0] * d
    run = 0
    for j in range(p - 1, 0, -1):
        run += ft[j]
        q[j - 1] = run
    return q


def pi_digits(x: CycElem, count: int):
    """First `count` digits of the pi-adic expansion, base-p digit set.

    Digits beyond position N*d of the stored representative are garbage,
    so count must stay within the working precision.
    """
    f = x.field
    if count > f.coeff_exp * f.d - f.d:
        raise ValueError("digit request beyond faithful precision")
    digits = []
    poly = list(x.coeffs)
    p = f.p
    for _ in range(count):
        r = sum(poly) % p
        digits.append(r)
        if r:
            poly[0] -= r
        poly = _exact_div_pi(poly, p)
    return digits


def valuation(x: CycElem):
    """Largest m <= prec with x in pi^m O, or None when indistinguishable
    from zero at the working precision."""
    f = x.field
    p = f.p
    poly = list(x.coeffs)
    for m in range(f.prec):
        if sum(poly) % p:
            return m
        poly = _exact_div_pi(poly, p)
    return None


def congruent(x: CycElem, y: CycElem, level: int | None = None) -> bool:
    """Whether x = y mod pi^level; level defaults to the full precision.

    Series results carry junk digits between pi^prec and the coefficient
    modulus, so exact coefficient comparison is only valid for values built
    purely from ring operations; everything else compares through here.
    """
    v = valuation(x - y)
    if v is None:
        return True
    return level is not None and v >= level


# -- Galois action -----------------------------------------------------------


def galois_apply(i: int, x: CycElem) -> CycElem:
    """The automorphism zeta -> zeta^i; composes like sigma_i sigma_j =
    sigma_{ij mod p}."""
    f = x.field
    p = f.p
    if i % p == 0:
        raise InvalidIndex("substitution index must be coprime to p")
    i %= p
    acc = [0] * p
    for j, cj in enumerate(x.coeffs):
        acc[(i * j) % p] += cj
    top = acc[p - 1]
    return CycElem(f, [acc[k] - top for k in range(p - 1)])


# -- Teichmueller lift -------------------------------------------------------


@lru_cache(maxsize=None)
def _teichmuller_int(p: int, coeff_exp: int) -> int:
    g = smallest_primitive_root(p)
    q = p**coeff_exp
    w = g % q
    while True:
        nxt = pow(w, p, q)
        if nxt == w:
            return w
        w = nxt


def teichmuller(field: FieldConfig) -> CycElem:
    """The primitive (p-1)-th root of unity in Z_p lifting the smallest
    primitive root mod p."""
    return CycElem.from_int(field, _teichmuller_int(field.p, field.coeff_exp))


def teichmuller_int(field: FieldConfig) -> int:
    return _teichmuller_int(field.p, field.coeff_exp)


# -- p-adic log / exp --------------------------------------------------------


def _vp_int(m: int, p: int) -> int:
    v = 0
    while m % p == 0:
        m //= p
        v += 1
    return v


def padic_log(u: CycElem) -> CycElem:
    """Logarithm on 1 + pi^2, inverse to padic_exp.

    The series sum (-1)^(m+1) (u-1)^m / m is run with two extra p-digits of
    coefficient headroom so the exact divisions by m keep full precision.
    """
    f = u.field
    t = u - CycElem.one(f)
    v = valuation(t)
    if not (v is None or v >= 2):
        raise DomainError("log requires v(u-1) >= 2")
    if v is None:
        return CycElem.zero(f)
    # every term with m > prec+1 has valuation 2m - d*v_p(m) > prec
    mmax = f.prec + 2
    s_max = 0
    m = f.p
    while m <= mmax:
        s_max += 1
        m *= f.p
    return _log_series(t, mmax, s_max)


def _log_series(t: CycElem, mmax: int, s_max: int) -> CycElem:
    f = t.field
    p, d = f.p, f.d
    q_hi = f.coeff_mod * p**s_max
    acc = [0] * d
    power = [1] + [0] * (d - 1)
    tv = [c % q_hi for c in t.coeffs]
    for m in range(1, mmax + 1):
        power = _mul_vec(power, tv, p, q_hi)
        s = _vp_int(m, p)
        unit = m // p**s
        inv_unit = pow(unit, -1, q_hi)
        sign = 1 if m % 2 == 1 else -1
        ps = p**s
        for k in range(d):
            c = power[k]
            if c % ps:
                raise DomainError("series term not exactly divisible")
            acc[k] += sign * (c // ps) * inv_unit
    return CycElem(f, acc)


def padic_exp(xi: CycElem) -> CycElem:
    """Exponential on pi^2, landing in 1 + pi^2."""
    f = xi.field
    v = valuation(xi)
    if not (v is None or v >= 2):
        raise DomainError("exp requires v(xi) >= 2")
    if v is None:
        return CycElem.one(f)
    p, d = f.p, f.d
    # every term with m > prec has valuation 2m - d*v_p(m!) >= m+1 > prec
    mmax = max(1, f.prec + 1)
    s_max = (mmax - 1) // (p - 1) + 1
    q_hi = f.coeff_mod * p**s_max
    acc = [1] + [0] * (d - 1)
    power = [1] + [0] * (d - 1)
    xv = [c % q_hi for c in xi.coeffs]
    fact_v = 0
    fact_unit = 1
    for m in range(1, mmax + 1):
        power = _mul_vec(power, xv, p, q_hi)
        s = _vp_int(m, p)
        fact_v += s
        fact_unit = (fact_unit * (m // p**s)) % q_hi
        inv_unit = pow(fact_unit, -1, q_hi)
        ps = p**fact_v
        for k in range(d):
            c = power[k]
            if c % ps:
                raise DomainError("series term not exactly divisible")
            acc[k] += (c // ps) * inv_unit
    return CycElem(f, acc)


# -- eigenprojectors ---------------------------------------------------------


def galois_power_apply(r: int, x: CycElem) -> CycElem:
    """Apply sigma^r where sigma = sigma_g for the fixed primitive root."""
    f = x.field
    g = smallest_primitive_root(f.p)
    return galois_apply(pow(g, r % f.d, f.p), x)


def eigenproject(x: CycElem, phi_exp: int, i: int) -> CycElem:
    """Projection of x onto the omega^i eigenspace of phi = sigma^phi_exp.

    Returns zero when omega^i is not an eigenvalue of phi.  Summing over
    all realized i recovers x.
    """
    f = x.field
    d = f.d
    from math import gcd

    m = d // gcd(d, phi_exp % d if phi_exp % d else d)
    if (i * m) % d != 0:
        return CycElem.zero(f)
    w = teichmuller_int(f)
    q = f.coeff_mod
    inv_m = pow(m, -1, q)
    acc = CycElem.zero(f)
    y = x
    for r in range(m):
        # y = phi^r(x); weight omega^{-i r}
        weight = pow(w, (-i * r) % d, q)
        acc = acc + y.scale(weight)
        y = galois_power_apply(phi_exp, y)
    return acc.scale(inv_m)


def sigma_eigenvector(field: FieldConfig, m: int) -> CycElem:
    """An exact sigma-eigenvector of eigenvalue omega^m with valuation m.

    Projects pi^m onto the eigenspace; the graded action of sigma makes the
    leading digit survive, so the fallback candidates pi^m * zeta^s should
    never be reached.
    """
    if m < 0 or m > field.prec - field.d:
        raise ValueError("requested valuation outside working range")
    pi = CycElem.pi(field)
    cand = pi.pow(m)
    for s in range(field.p):
        a = eigenproject(cand, 1, m % field.d)
        if valuation(a) == m:
            return a
        cand = cand * CycElem.zeta(field)
    raise EigenvectorNotFound(f"no eigenvector of valuation {m}")
