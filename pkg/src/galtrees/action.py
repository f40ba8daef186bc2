"""The twisted action on parameter tuples and its orbit machinery.

Group elements live in the finite quotient (U / <zeta> U_J) x <sigma>,
written as triples (a, xi, r) for omega^a exp(xi) paired with sigma^r.
The zeta factor acts trivially on parameters and is dropped throughout.
The U_2-part xi is a window vector over a_0..a_{d-1} with per-coordinate
moduli determined by the quotient depth J, which makes stabilizer algebra
plain echelon work over Z/p^m: leading valuations of echelon generators
occupy distinct window offsets, so sizes and membership are exact.

On a layer at depth e every group element acts affinely with a diagonal
linear part, so orbit enumeration precomputes one lookup table per
generator over the packed layer points.
"""

from dataclasses import dataclass, replace

from .cyclo import CycElem, FieldConfig, smallest_primitive_root
from .errors import (
    EnumerationBudget,
    InternalInconsistency,
    NotAUnit,
    NotInStabilizer,
)
from .lattice import ParamPoint, add_points, gamma_member, layer_digit, sub_points
from .units import TauContext, discrete_log, quotient_level


class ActorContext:
    """Shared tables for one session: quotient depth, moduli, twist data."""

    def __init__(self, field: FieldConfig, basis, n: int, e_max: int):
        self.field = field
        self.basis = basis
        self.n = n
        self.e_max = e_max
        self.J = quotient_level(field, n, e_max).level
        p, d = field.p, field.d
        self.p, self.d = p, d
        self.g = smallest_primitive_root(p)
        # canonical per-offset moduli exponents for U_2/U_J log vectors
        self.mods = tuple(max(0, -(-(self.J - t) // d)) for t in range(d))
        self.mod_pows = tuple(p**e for e in self.mods)
        # uniform working exponent with one headroom digit
        self.ue = max(self.mods) + 1
        self.uq = p**self.ue
        self.omega_u = basis.omega % self.uq
        # lam[i][t]: eigen multiplier of sigma_i + sigma_{1-i} - 1 at offset t
        self.lam = {}
        for i in range(2, field.ell + 2):
            ri = discrete_log(field, i)
            rj = discrete_log(field, (1 - i) % p)
            self.lam[i] = tuple(
                (pow(self.omega_u, ri * t % d, self.uq)
                 + pow(self.omega_u, rj * t % d, self.uq) - 1) % self.uq
                for t in range(d)
            )
        self.identity = (0, (0,) * d, 0)

    # -- canonical forms -----------------------------------------------------

    def canon_xi(self, xi):
        return tuple(c % m if m > 1 else 0 for c, m in zip(xi, self.mod_pows))

    def canon(self, actor):
        a, xi, r = actor
        return (a % self.d, self.canon_xi(xi), r % self.d)

    # -- group operations ------------------------------------------------------

    def sigma_xi(self, xi, r):
        """Galois twist of a log vector: offset t scaled by omega^(r t)."""
        if r % self.d == 0:
            return xi
        w = self.omega_u
        d, q = self.d, self.uq
        return tuple(c * pow(w, (r * t) % d, q) % q for t, c in enumerate(xi))

    def compose(self, g1, g2):
        a1, x1, r1 = g1
        a2, x2, r2 = g2
        x2r = self.sigma_xi(x2, r1)
        xi = tuple((u + v) % self.uq for u, v in zip(x1, x2r))
        return ((a1 + a2) % self.d, self.canon_xi(xi), (r1 + r2) % self.d)

    def inverse(self, g):
        a, xi, r = g
        neg = tuple(-c % self.uq for c in xi)
        return ((-a) % self.d, self.canon_xi(self.sigma_xi(neg, -r)), (-r) % self.d)

    def power(self, g, k):
        if k < 0:
            return self.power(self.inverse(g), -k)
        out = self.identity
        for _ in range(k):
            out = self.compose(out, g)
        return out

    # -- valuation structure of log vectors -----------------------------------

    def xi_lead(self, xi):
        """(valuation, offset, unit digit) of the leading term, or None."""
        best = None
        p, d = self.p, self.d
        for t, c in enumerate(xi):
            e = self.mods[t]
            cc = c % self.mod_pows[t] if e else 0
            if cc == 0:
                continue
            v = 0
            while cc % p == 0:
                cc //= p
                v += 1
            cand = (t + d * v, t, cc % p)
            if best is None or cand[0] < best[0]:
                best = cand
        return best

    def xi_is_zero(self, xi):
        return self.xi_lead(xi) is None

    # -- the twisted unit multiplier -------------------------------------------

    def unit_window(self, a, xi, j):
        """Window coordinates of rho_{j+1}(omega^a exp xi)^(-1), the unit that
        multiplies coordinate j under the action."""
        lam = self.lam[j + 1]
        eta_vec = tuple(-l * c % self.uq for l, c in zip(lam, xi))
        w = window_exp(self.basis, eta_vec, self.ue)
        if a % self.d:
            s = pow(self.omega_u, (-a) % self.d, self.uq)
            w = tuple(c * s % self.uq for c in w)
        return w


def window_exp(basis, vec, exp):
    """exp of a log vector with v >= 2, as a unit window over a_0..a_{d-1}.

    Series terms are computed with enough spare p-digits that the exact
    factorial divisions keep the requested precision.
    """
    f = basis.field
    p, d = f.p, f.d
    if vec[0] % p or vec[1] % p:
        raise ValueError("window exp requires valuation >= 2")
    mmax = (d * exp) // 2 + 2
    s_max = 0
    m, c = p, 1
    while m <= mmax:
        s_max += (mmax // m)
        m *= p
    q = p ** (exp + s_max)
    lifted = tuple(c % q for c in vec)
    acc = [1] + [0] * (d - 1)
    power = (1,) + (0,) * (d - 1)
    fact_v, fact_unit = 0, 1
    for m in range(1, mmax + 1):
        power = basis.conv(lifted, power, exp + s_max)
        mm = m
        while mm % p == 0:
            fact_v += 1
            mm //= p
        fact_unit = fact_unit * mm % q
        inv_unit = pow(fact_unit, -1, q)
        ps = p**fact_v
        for t in range(d):
            c = power[t]
            if c % ps:
                raise InternalInconsistency("exp series division not exact")
            acc[t] += (c // ps) * inv_unit
    qq = p**exp
    return tuple(c % qq for c in acc)


def act_actor(actx: ActorContext, actor, x: ParamPoint) -> ParamPoint:
    """Apply (omega^a exp xi, sigma^r); faithful up to the quotient depth J
    above each window start."""
    a, xi, r = actor
    f = actx.field
    p, d = f.p, f.d
    q = p**x.exp
    wins = []
    need_unit = a % d != 0 or not actx.xi_is_zero(xi)
    for j in range(1, f.ell + 1):
        vec = x.windows[j - 1]
        start = x.window_start(j)
        if r % d:
            w0 = actx.basis.omega % q
            vec = tuple(
                c * pow(w0, (r * (start + t)) % d, q) % q
                for t, c in enumerate(vec)
            )
        if need_unit:
            mult = actx.unit_window(a, xi, j)
            vec = actx.basis.conv(mult, vec, x.exp)
        wins.append(tuple(c % q for c in vec))
    return ParamPoint(x.basis, x.n, x.exp, tuple(wins))


# -- spec-level action on explicit units -------------------------------------


def act(field: FieldConfig, u: CycElem, r: int, x: ParamPoint) -> ParamPoint:
    """The action of (u, sigma^r) with u an explicit unit, at full precision.

    Coordinate j maps to rho_{j+1}(u)^(-1) sigma^r(x_j).
    """
    from .cyclo import galois_power_apply
    from .lattice import from_coords
    from .units import rho

    if not u.is_unit():
        raise NotAUnit("action requires a unit")
    coords = []
    for j, xc in enumerate(x.coords(), start=1):
        y = galois_power_apply(r, xc)
        coords.append(rho(j + 1, u).invert() * y)
    return from_coords(field, x.n, coords)


def affine_act(actx: ActorContext, actor, x: ParamPoint, digits, e: int):
    """Affine layer action u . y = [(u)(x) - x] + (u)(y) at depth e,
    for actors stabilizing x mod the level-(n+e) sublattice."""
    moved = act_actor(actx, actor, x)
    diff = sub_points(moved, x)
    if not gamma_member(diff, x.n + e):
        raise NotInStabilizer("actor does not stabilize the coset")
    offset = layer_digit(diff, e)
    mult, gal = _layer_diag(actx, actor, x.n, e)
    p = actx.p
    return tuple(
        (mult * gal[j] * t + offset[j]) % p for j, t in enumerate(digits)
    )


def _layer_diag(actx: ActorContext, actor, n: int, e: int):
    """Diagonal residues of the linear part on the depth-e layer."""
    a, xi, r = actor
    p, d, g = actx.p, actx.d, actx.g
    mult = pow(g, (-a) % d, p)
    gal = tuple(
        pow(g, (r * (n + e - 2 * (j + 1))) % d, p)
        for j in range(actx.field.ell)
    )
    return mult, gal


# -- stabilizers ---------------------------------------------------------------


@dataclass(frozen=True)
class Stabilizer:
    """Subgroup of the acting quotient: echelonized U_2-part, at most one
    mixed generator carrying the Galois image, omega only at the root."""

    actx: ActorContext
    units: tuple  # canonical log vectors, distinct leading offsets
    mixed: tuple | None  # actor (a, xi, r) with minimal positive r, or None
    omega_full: bool = False

    def generators(self):
        gens = []
        if self.omega_full:
            gens.append((1, (0,) * self.actx.d, 0))
        gens.extend((0, xi, 0) for xi in self.units)
        if self.mixed is not None:
            gens.append(self.mixed)
        return gens

    def unit_size(self) -> int:
        size = 1
        for xi in self.units:
            v = self.actx.xi_lead(xi)[0]
            size *= self.actx.p ** max(0, -(-(self.actx.J - v) // self.actx.d))
        return size

    def galois_image_order(self) -> int:
        if self.mixed is None:
            return 1
        return self.actx.d // self.mixed[2]

    def size(self) -> int:
        s = self.unit_size() * self.galois_image_order()
        if self.omega_full:
            s *= self.actx.d
        return s

    def contains_unit(self, xi) -> bool:
        return self.actx.xi_is_zero(_reduce_xi(self.actx, xi, self.units))


def root_stabilizer(actx: ActorContext) -> Stabilizer:
    """The full acting group: omega, all of U_2/U_J, and sigma."""
    units = []
    p, d = actx.p, actx.d
    for t in range(d):
        if actx.mods[t] == 0:
            continue
        lead_val = t if t >= 2 else t + d
        if lead_val >= actx.J:
            continue
        c = 1 if t >= 2 else p
        vec = [0] * d
        vec[t] = c
        units.append(actx.canon_xi(tuple(vec)))
    mixed = (0, (0,) * d, 1)
    return Stabilizer(actx, tuple(units), mixed, omega_full=True)


def _reduce_xi(actx, xi, units):
    """Reduce a log vector against an echelon basis; returns the residue."""
    xi = actx.canon_xi(xi)
    by_offset = {}
    for u in units:
        lead = actx.xi_lead(u)
        by_offset[lead[1]] = (lead, u)
    p, d = actx.p, actx.d
    while True:
        lead = actx.xi_lead(xi)
        if lead is None:
            return xi
        v, t, dig = lead
        hit = by_offset.get(t)
        if hit is None or hit[0][0] > v:
            return xi
        (bv, bt, bdig), base = hit
        s = (v - bv) // d
        coef = dig * pow(bdig, -1, p) % p
        scale = coef * p**s
        xi = actx.canon_xi(
            tuple((c - scale * b) % actx.uq for c, b in zip(xi, base))
        )


def _echelon_insert(actx, units, xi):
    """Insert a log vector, keeping one generator per leading offset with
    minimal leading valuation; returns the updated tuple."""
    pending = [xi]
    units = list(units)
    while pending:
        cand = _reduce_xi(actx, pending.pop(), tuple(units))
        lead = actx.xi_lead(cand)
        if lead is None:
            continue
        slot = lead[1]
        existing = None
        for k, u in enumerate(units):
            if actx.xi_lead(u)[1] == slot:
                existing = k
                break
        if existing is None:
            units.append(cand)
        else:
            old = units[existing]
            if actx.xi_lead(old)[0] <= lead[0]:
                raise InternalInconsistency("reduction left a reducible vector")
            units[existing] = cand
            pending.append(old)
    units.sort(key=lambda u: actx.xi_lead(u)[0])
    return tuple(units)


class StabilizerBuilder:
    """Accumulates Schreier generators into echelon + mixed form.

    Elements with nontrivial Galois exponent are kept as one witness per
    achieved exponent; two witnesses at the same exponent differ by a
    U_2-element, which is folded into the echelon.  The exponent lattice in
    Z/d has at most d states, so folding terminates immediately.
    """

    def __init__(self, actx: ActorContext):
        self.actx = actx
        self.units = ()
        self.witness = {}  # galois exponent -> one group element

    def insert(self, actor):
        actx = self.actx
        actor = actx.canon(actor)
        a, xi, r = actor
        if r == 0:
            if a != 0:
                raise InternalInconsistency(
                    "pure omega component in a deep stabilizer"
                )
            if not actx.xi_is_zero(xi):
                self.units = _echelon_insert(actx, self.units, xi)
            return
        if r in self.witness:
            resid = actx.compose(actor, actx.inverse(self.witness[r]))
            self.insert(resid)
            return
        self.witness[r] = actor
        # close the exponent set under addition
        pending = [r]
        while pending:
            r1 = pending.pop()
            for r2 in list(self.witness):
                r3 = (r1 + r2) % actx.d
                combo = actx.compose(self.witness[r1] if r1 else actx.identity,
                                     self.witness[r2])
                if r3 == 0:
                    self.insert(combo)
                elif r3 not in self.witness:
                    self.witness[r3] = combo
                    pending.append(r3)
                else:
                    resid = actx.compose(combo, actx.inverse(self.witness[r3]))
                    self.insert(resid)

    @property
    def mixed(self):
        if not self.witness:
            return None
        m0 = min(self.witness)
        return self.witness[m0]

    def close_conjugation(self):
        """Ensure the unit part is invariant under the mixed generator."""
        actx = self.actx
        mixed = self.mixed
        if mixed is None:
            return
        changed = True
        while changed:
            changed = False
            for xi in self.units:
                conj = actx.canon_xi(actx.sigma_xi(xi, mixed[2]))
                if not actx.xi_is_zero(_reduce_xi(actx, conj, self.units)):
                    self.units = _echelon_insert(actx, self.units, conj)
                    changed = True

    def build(self, omega_full=False) -> Stabilizer:
        mixed = self.mixed
        if mixed is not None:
            actx = self.actx
            m0 = mixed[2]
            if actx.d % m0 != 0:
                raise InternalInconsistency("galois exponent lattice not closed")
            # express every witness through the minimal one
            for r, w in list(self.witness.items()):
                if r == m0:
                    continue
                resid = actx.compose(w, actx.inverse(actx.power(mixed, r // m0)))
                if resid[2] != 0:
                    raise InternalInconsistency("witness folding failed")
                self.insert(resid)
        return Stabilizer(self.actx, self.units, self.mixed, omega_full)


def stab_galois_order(stab: Stabilizer) -> int:
    """Order of the Galois projection image; divides d."""
    return stab.galois_image_order() if not stab.omega_full else stab.actx.d


# -- layer orbit enumeration ---------------------------------------------------


class LayerScan:
    """All orbit data of one stabilizer on one layer.

    Points are packed digit tuples; per generator one lookup table drives
    unit-orbit BFS, a sigma-merge, per-orbit Galois orders and, on demand,
    transversals for Schreier refinement.
    """

    def __init__(self, actx: ActorContext, stab: Stabilizer, x: ParamPoint,
                 e: int, budget: int = 10**6):
        f = actx.field
        p, ell = actx.p, f.ell
        self.size = p**ell
        if self.size > budget:
            raise EnumerationBudget(f"layer has {self.size} points")
        self.actx, self.stab, self.x, self.e = actx, stab, x, e
        self.p, self.ell = p, ell
        self.unit_gens = []
        self.unit_tables = []
        mixed = None
        for gen in stab.generators():
            table = self._gen_table(gen)
            if gen[2] % actx.d == 0:
                self.unit_gens.append(gen)
                self.unit_tables.append(table)
            else:
                mixed = gen
                self.mixed_table = table
        self.mixed = mixed
        if mixed is None:
            self.mixed_table = list(range(self.size))
        self._scan()

    # packing helpers

    def pack(self, digits):
        v = 0
        for t in reversed(digits):
            v = v * self.p + t
        return v

    def unpack(self, v):
        out = []
        for _ in range(self.ell):
            out.append(v % self.p)
            v //= self.p
        return tuple(out)

    def _gen_table(self, actor):
        actx, x, e = self.actx, self.x, self.e
        moved = act_actor(actx, actor, x)
        diff = sub_points(moved, x)
        if not gamma_member(diff, x.n + e):
            raise NotInStabilizer("generator does not stabilize the node")
        offset = layer_digit(diff, e)
        mult, gal = _layer_diag(actx, actor, x.n, e)
        p = self.p
        coef = [mult * gal[j] % p for j in range(self.ell)]
        table = [0] * self.size
        for v in range(self.size):
            digs = self.unpack(v)
            table[v] = self.pack(
                tuple((coef[j] * digs[j] + offset[j]) % p for j in range(self.ell))
            )
        return table

    def _scan(self):
        size = self.size
        unit_id = [-1] * size
        order = []
        for s in range(size):
            if unit_id[s] >= 0:
                continue
            unit_id[s] = s
            frontier = [s]
            while frontier:
                nxt = []
                for v in frontier:
                    for tbl in self.unit_tables:
                        w = tbl[v]
                        if unit_id[w] < 0:
                            unit_id[w] = s
                            nxt.append(w)
                frontier = nxt
        self.unit_id = unit_id
        # ambient orbits: merge unit orbits along the mixed generator
        parent = list(range(size))

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for v in range(size):
            a, b = find(unit_id[v]), find(unit_id[self.mixed_table[v]])
            if a != b:
                parent[max(a, b)] = min(a, b)
        amb = [0] * size
        reps = {}
        for v in range(size):
            r = find(unit_id[v])
            amb[v] = r
            reps.setdefault(r, v)
        self.ambient_id = amb
        self.orbit_reps = sorted(reps)

    def orbit_points(self, rep):
        return [v for v in range(self.size) if self.ambient_id[v] == rep]

    def orbit_size(self, rep):
        return sum(1 for v in range(self.size) if self.ambient_id[v] == rep)

    def point_galois_order(self, v):
        """Order of the Galois image of the stabilizer of point v.

        A Galois exponent r is achieved at v exactly when the r-witness
        moves v within its unit orbit; the achieved set is a subgroup of
        Z/d, generated by its smallest positive member.
        """
        if self.mixed is None:
            return 1
        import math

        d, m0 = self.actx.d, self.mixed[2]
        base = self.unit_id[v]
        w = v
        for j in range(1, d // m0 + 1):
            w = self.mixed_table[w]
            if self.unit_id[w] == base:
                return d // math.gcd(j * m0, d)
        return 1

    def refine(self, rep) -> Stabilizer:
        """Stabilizer of the point rep inside the node stabilizer, via
        Schreier generators with early exit at the orbit-stabilizer size."""
        actx, stab = self.actx, self.stab
        gen_tabs = list(zip(self.unit_gens, self.unit_tables))
        if self.mixed is not None:
            gen_tabs.append((self.mixed, self.mixed_table))
        transversal = {rep: actx.identity}
        order = [rep]
        frontier = [rep]
        while frontier:
            nxt = []
            for v in frontier:
                gv = transversal[v]
                for gen, tbl in gen_tabs:
                    w = tbl[v]
                    if w not in transversal:
                        transversal[w] = actx.compose(gen, gv)
                        nxt.append(w)
                        order.append(w)
            frontier = nxt
        orbit_size = len(transversal)
        total = stab.size()
        if total % orbit_size:
            raise InternalInconsistency("orbit size does not divide group size")
        target = total // orbit_size
        builder = StabilizerBuilder(actx)

        def current_size():
            return Stabilizer(actx, builder.units, builder.mixed).size()

        for v in order:
            gv = transversal[v]
            for gen, tbl in gen_tabs:
                w = tbl[v]
                h = actx.compose(actx.inverse(transversal[w]),
                                 actx.compose(gen, gv))
                if h == actx.identity:
                    continue
                builder.insert(h)
                if current_size() == target:
                    return builder.build()
        builder.close_conjugation()
        if current_size() != target:
            raise InternalInconsistency(
                f"refined stabilizer size {current_size()} != target {target}"
            )
        return builder.build()


def layer_orbits(actx: ActorContext, stab: Stabilizer, x: ParamPoint, e: int,
                 restriction=None, budget: int = 10**6):
    """Orbit representatives of the node stabilizer on the depth-e layer.

    Unrestricted: one representative per ambient orbit (the zero class
    included), each with its refined stabilizer.  With a slice restriction,
    only orbits meeting the slice are returned and representatives are the
    smallest slice points, per the slice-intersection rule.
    """
    scan = LayerScan(actx, stab, x, e, budget)
    out = []
    if restriction is None:
        for rep in scan.orbit_reps:
            out.append((scan.unpack(rep), scan.refine(rep)))
        return out
    positions = set(restriction.layer_positions(e))
    seen = set()
    for v in range(scan.size):
        digs = scan.unpack(v)
        if any(t and (j + 1) not in positions for j, t in enumerate(digs)):
            continue
        rep = scan.ambient_id[v]
        if rep in seen:
            continue
        seen.add(rep)
        out.append((digs, scan.refine(v)))
    return out
