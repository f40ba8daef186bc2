"""Parameter lattices in the diagonal eigen-coordinate model.

The ambient lattice at level n is the direct sum over j = 1..ell of
pi^(n-2j) in coordinate j.  Each coordinate is expanded over the
multiplicative family a_m = a_1^m of exact sigma-eigenvectors, where
a_1 projects the uniformizer onto the omega-eigenspace of sigma.  In these
coordinates:

  * sigma^r acts diagonally, index m scaled by omega^(r m);
  * valuations read off as min(m + d * v_p(c_m));
  * the eigen-sublattices of tau = sigma^k become support conditions;
  * multiplication by p shifts indices by d up to the fixed unit a_1^d / p.

A coordinate of a point at window start m0 is a length-d integer vector
(c_0..c_{d-1}) with c_t the coefficient of a_(m0+t), held mod p^E for a
uniform exponent E that keeps every coordinate faithful to the working
pi-precision.
"""

from dataclasses import dataclass
from functools import lru_cache

from .cyclo import (
    CycElem,
    FieldConfig,
    eigenproject,
    sigma_eigenvector,
    valuation,
)
from .errors import InternalInconsistency, PrecisionExhausted
from .units import TauContext


class EigenBasis:
    """Shared eigen-coordinate tables for one field."""

    def __init__(self, field: FieldConfig):
        self.field = field
        self.a1 = sigma_eigenvector(field, 1)
        self._a_pows = [CycElem.one(field), self.a1]
        # a_1^d is p times a Galois-fixed unit eta of Z_p
        ad = self.a1.pow(field.d)
        if any(c % field.p for c in ad.coeffs) or any(c for c in ad.coeffs[1:]):
            raise InternalInconsistency("a_1^d is not p * (p-adic unit)")
        self.eta = (ad.coeffs[0] // field.p) % (field.coeff_mod // field.p)
        from .cyclo import teichmuller_int

        self.omega = teichmuller_int(field)

    def a_pow(self, m: int) -> CycElem:
        while len(self._a_pows) <= m:
            self._a_pows.append(self._a_pows[-1] * self.a1)
        return self._a_pows[m]

    def omega_pow(self, e: int, mod: int) -> int:
        return pow(self.omega, e % self.field.d, mod)

    # -- window conversions ------------------------------------------------

    def to_window(self, x: CycElem, lo: int, exp: int):
        """Eigen coordinates (c_0..c_{d-1}) of x over a_lo..a_{lo+d-1},
        each mod p^exp; requires x in pi^lo."""
        f = self.field
        p, d = f.p, f.d
        out = []
        for t in range(d):
            m = lo + t
            xt = eigenproject(x, 1, m % d)
            k = -(-m // d)  # ceil(m/d)
            if exp + k > f.coeff_exp:
                raise PrecisionExhausted("window extraction beyond precision")
            y = xt * self.a_pow(k * d - m)
            pk = p**k
            c0 = y.coeffs[0]
            # y is the exact constant c * eta^k * p^k, so the stored vector
            # must be (c0, 0, ..., 0) with p^k | c0
            if c0 % pk or any(y.coeffs[1:]):
                raise InternalInconsistency("eigen component is not constant")
            c = (c0 // pk) * pow(self.eta, -k, p**exp) if k else c0
            out.append(c % p**exp)
        return tuple(out)

    def from_window(self, vec, lo: int) -> CycElem:
        acc = CycElem.zero(self.field)
        for t, c in enumerate(vec):
            if c:
                acc = acc + self.a_pow(lo + t).scale(c)
        return acc

    def conv(self, u_vec, x_vec, exp: int):
        """Product of a unit window [0, d) with a point window [lo, lo+d),
        expressed back in the point window; wrap picks up the p*eta fold."""
        p, d = self.field.p, self.field.d
        mod = p**exp
        fold = (p * self.eta) % mod
        out = [0] * d
        for r, ur in enumerate(u_vec):
            if ur == 0:
                continue
            for s, xs in enumerate(x_vec):
                if xs == 0:
                    continue
                t = r + s
                if t < d:
                    out[t] += ur * xs
                else:
                    out[t - d] += ur * xs * fold
        return tuple(c % mod for c in out)


@lru_cache(maxsize=None)
def eigen_basis(field: FieldConfig) -> EigenBasis:
    return EigenBasis(field)


def _vp(c: int, p: int, cap: int) -> int:
    """p-valuation of c mod p^cap; cap when c = 0."""
    if c == 0:
        return cap
    v = 0
    while c % p == 0 and v < cap:
        c //= p
        v += 1
    return v


def param_exp(field: FieldConfig, n: int) -> int:
    """Uniform coordinate exponent keeping windows faithful to prec.

    The lowest window start n - 2*ell dictates the digit count; the highest
    window index must still extract within the coefficient modulus, which
    the two spare p-digits of coeff_exp cover exactly.
    """
    lo = n - 2 * field.ell
    if lo < 1:
        raise ValueError("lattice level too small for the diagonal model")
    need = -(-(field.prec - lo) // field.d)
    room = field.coeff_exp - (-(-(n - 2 + field.d - 1) // field.d))
    if need > room:
        raise PrecisionExhausted("session precision too small for level n")
    return need


@dataclass(frozen=True)
class ParamPoint:
    """An ell-tuple over the field in window coordinates; coordinate j
    (1-based) is a window starting at n - 2j."""

    basis: EigenBasis
    n: int
    exp: int
    windows: tuple

    @property
    def field(self):
        return self.basis.field

    def window_start(self, j: int) -> int:
        return self.n - 2 * j

    def coords(self):
        """Materialize the coordinates as ring elements."""
        return tuple(
            self.basis.from_window(w, self.window_start(j + 1))
            for j, w in enumerate(self.windows)
        )

    def coordinate_valuation(self, j: int):
        """Valuation of coordinate j (1-based), or None past precision."""
        f = self.field
        start = self.window_start(j)
        vec = self.windows[j - 1]
        best = None
        for t, c in enumerate(vec):
            v = _vp(c, f.p, self.exp)
            if v >= self.exp:
                continue
            cand = start + t + f.d * v
            if best is None or cand < best:
                best = cand
        return best

    def __hash__(self):
        return hash((self.n, self.exp, self.windows))


def zero_point(field: FieldConfig, n: int) -> ParamPoint:
    basis = eigen_basis(field)
    e = param_exp(field, n)
    return ParamPoint(basis, n, e, tuple((0,) * field.d for _ in range(field.ell)))


def from_coords(field: FieldConfig, n: int, coords) -> ParamPoint:
    """Build a point from ring-element coordinates (coordinate j in
    pi^(n-2j))."""
    basis = eigen_basis(field)
    e = param_exp(field, n)
    wins = tuple(
        basis.to_window(x, n - 2 * (j + 1), e) for j, x in enumerate(coords)
    )
    return ParamPoint(basis, n, e, wins)


def add_points(x: ParamPoint, y: ParamPoint) -> ParamPoint:
    if x.n != y.n:
        raise ValueError("points live at different lattice levels")
    q = x.field.p**x.exp
    wins = tuple(
        tuple((a + b) % q for a, b in zip(wx, wy))
        for wx, wy in zip(x.windows, y.windows)
    )
    return ParamPoint(x.basis, x.n, x.exp, wins)


def sub_points(x: ParamPoint, y: ParamPoint) -> ParamPoint:
    q = x.field.p**x.exp
    wins = tuple(
        tuple((a - b) % q for a, b in zip(wx, wy))
        for wx, wy in zip(x.windows, y.windows)
    )
    return ParamPoint(x.basis, x.n, x.exp, wins)


def scale_point(x: ParamPoint, k: int) -> ParamPoint:
    q = x.field.p**x.exp
    wins = tuple(tuple((k * a) % q for a in w) for w in x.windows)
    return ParamPoint(x.basis, x.n, x.exp, wins)


def gamma_member(x: ParamPoint, n: int) -> bool:
    """Membership in the level-n lattice: coordinate j has valuation at
    least n - 2j."""
    for j in range(1, x.field.ell + 1):
        floor = x.window_start(j) + x.field.d * x.exp
        need = n - 2 * j
        if need > floor:
            raise PrecisionExhausted("membership beyond working precision")
        v = x.coordinate_valuation(j)
        if v is not None and v < need:
            return False
    return True


def delta_member(x: ParamPoint, n: int) -> bool:
    """Exact level n: inside the level-n lattice, outside level n+1."""
    if not gamma_member(x, n):
        return False
    return any(
        x.coordinate_valuation(j) == n - 2 * j
        for j in range(1, x.field.ell + 1)
    )


def reduce_mod(x: ParamPoint, e: int) -> ParamPoint:
    """Canonical representative mod the level-(n+e) sublattice: clears all
    digit content of coordinate j at valuations >= n + e - 2j."""
    if e < 0:
        raise ValueError("negative depth")
    p, d = x.field.p, x.field.d
    wins = []
    for w in x.windows:
        trunc = []
        for t, c in enumerate(w):
            lv = max(0, -(-(e - t) // d))
            trunc.append(c % p**lv if lv < x.exp else c)
        wins.append(tuple(trunc))
    return ParamPoint(x.basis, x.n, x.exp, tuple(wins))


def point_key(x: ParamPoint, e: int):
    """Hashable canonical identity of x mod the level-(n+e) sublattice."""
    return reduce_mod(x, e).windows


def layer_digit(x: ParamPoint, e: int):
    """Class of x in the level-(n+e) layer, as ell residues mod p.

    Residue j is the a-basis coefficient at valuation n + e - 2j; requires
    x to lie in the level-(n+e) sublattice.
    """
    f = x.field
    p, d = f.p, f.d
    t0 = e % d
    s = (e - t0) // d
    adj = pow(x.basis.eta, -s, p) if s else 1
    out = []
    for w in x.windows:
        c = w[t0]
        if c % p**s:
            raise InternalInconsistency("point not in the requested layer")
        out.append((c // p**s) * adj % p)
    return tuple(out)


def add_layer(x: ParamPoint, digits, e: int) -> ParamPoint:
    """Add the lift of a layer class at level n+e to x."""
    f = x.field
    p, d = f.p, f.d
    q = p**x.exp
    t0 = e % d
    s = (e - t0) // d
    lift = pow(x.basis.eta, s, q) * p**s if s else 1
    wins = []
    for j, w in enumerate(x.windows):
        wl = list(w)
        wl[t0] = (wl[t0] + digits[j] * lift) % q
        wins.append(tuple(wl))
    return ParamPoint(x.basis, x.n, x.exp, tuple(wins))


def mul_p(x: ParamPoint) -> ParamPoint:
    """Multiplication by p; maps level-m sublattices to level m+d."""
    return scale_point(x, x.field.p)


# -- eigen sublattices -------------------------------------------------------


@dataclass(frozen=True)
class EigenSlice:
    """The tau-eigenspace sublattice of eigenvalue exponent i at level n.

    support[j-1] is the set of window offsets t admissible in coordinate j:
    exactly those with k*(n - 2j + t) = i mod d.
    """

    ctx: TauContext
    n: int
    i: int
    support: tuple

    def layer_positions(self, e: int):
        """Coordinates j whose level-(n+e) digit lies in the slice."""
        d = self.ctx.field.d
        return tuple(
            j
            for j in range(1, self.ctx.field.ell + 1)
            if (e % d) in self.support[j - 1]
        )


def eigen_slice(field: FieldConfig, n: int, i: int, ctx: TauContext) -> EigenSlice:
    d = field.d
    support = []
    for j in range(1, field.ell + 1):
        start = n - 2 * j
        support.append(
            frozenset(t for t in range(d) if ctx.k * (start + t) % d == i % d)
        )
    return EigenSlice(ctx, n, i % d, tuple(support))


def slice_member(x: ParamPoint, sl: EigenSlice) -> bool:
    """Exact eigen-equation membership: nonzero coordinates only on the
    admissible offsets (at working precision)."""
    for j, w in enumerate(x.windows):
        for t, c in enumerate(w):
            if c and t not in sl.support[j]:
                return False
    return True


def slice_project(x: ParamPoint, sl: EigenSlice) -> ParamPoint:
    """Zero out all window entries outside the slice support."""
    wins = tuple(
        tuple(c if t in sl.support[j] else 0 for t, c in enumerate(w))
        for j, w in enumerate(x.windows)
    )
    return ParamPoint(x.basis, x.n, x.exp, wins)


def omega_member(x: ParamPoint, n: int, i: int, ctx: TauContext) -> bool:
    """Exact-level eigen membership: in the slice at level n, not in the
    level-(n+1) sublattice."""
    sl = eigen_slice(ctx.field, n, i, ctx)
    return slice_member(x, sl) and delta_member(x, n)


def admissible_types(field: FieldConfig, ctx: TauContext, n: int):
    """Eigenvalue exponents i with a nonempty exact-level-n eigenspace:
    i = k(n-2j) mod d for some coordinate j."""
    return sorted({ctx.k * (n - 2 * j) % field.d for j in range(1, field.ell + 1)})


def slice_generator(field: FieldConfig, n: int, j: int, t: int) -> ParamPoint:
    """The point with a_(n-2j+t) in coordinate j and zeros elsewhere."""
    x = zero_point(field, n)
    wins = list(x.windows)
    w = list(wins[j - 1])
    w[t] = 1
    wins[j - 1] = tuple(w)
    return ParamPoint(x.basis, x.n, x.exp, tuple(wins))


def decompose(x: ParamPoint, ctx: TauContext):
    """Split x into its tau-eigen components, indexed by eigenvalue
    exponent; reassembling the parts reproduces x exactly."""
    d = x.field.d
    parts = {}
    for i in sorted({ctx.k * m % d for m in range(d)}):
        sl = eigen_slice(x.field, x.n, i, ctx)
        p = slice_project(x, sl)
        if any(any(w) for w in p.windows):
            parts[i] = p
    return parts
