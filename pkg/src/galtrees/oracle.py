"""Independent small-instance ground truth by exhaustive orbit closure.

Points of the exact-level set modulo the depth-e sublattice are written in
pi-digit coordinates extracted by the integer division chain, with no
eigen-coordinate machinery involved.  Every generator acts additively on
the quotient, and for e <= d the quotient is an F_p-vector space, so each
generator is realized as a matrix obtained by acting on the digit basis
through the explicit ring formulas.  Orbits are plain breadth-first
closures under the generator set.
"""

from dataclasses import dataclass

import numpy as np

from .cyclo import (
    CycElem,
    FieldConfig,
    congruent,
    galois_power_apply,
    padic_exp,
    pi_digits,
    teichmuller,
)
from .errors import EnumerationBudget
from .units import quotient_level, rho


@dataclass
class BruteResult:
    p: int
    n: int
    e: int
    class_of: dict  # packed digit tuple -> class index
    class_sizes: list
    class_gal: list
    class_reps: list  # one packed point per class


def _digit_key(field, coords, n, e):
    """Canonical pi-digit coordinates of a parameter tuple mod level n+e."""
    key = []
    for j, x in enumerate(coords, start=1):
        digs = pi_digits(x, n + e - 2 * j)
        lead = digs[: n - 2 * j]
        if any(lead):
            raise ValueError("coordinate below the ambient lattice level")
        key.extend(digs[n - 2 * j:])
    return tuple(key)


def _basis_elem(field, n, j, t):
    """Parameter tuple with pi^(n-2j+t) in coordinate j, zero elsewhere."""
    coords = [CycElem.zero(field) for _ in range(field.ell)]
    coords[j - 1] = CycElem.pi(field).pow(n - 2 * j + t)
    return coords


def _apply_gen(field, unit, r, coords, n):
    """(u, sigma^r) acting through the explicit twist formula."""
    out = []
    for j, x in enumerate(coords, start=1):
        y = galois_power_apply(r, x)
        if unit is not None:
            y = rho(j + 1, unit).invert() * y
        out.append(y)
    return out


def _gen_matrix(field, unit, r, n, e):
    """F_p-matrix of one generator on the depth-e quotient (valid for
    e <= d, where the quotient has exponent p)."""
    dim = field.ell * e
    cols = []
    for j in range(1, field.ell + 1):
        for t in range(e):
            img = _apply_gen(field, unit, r, _basis_elem(field, n, j, t), n)
            cols.append(_digit_key(field, img, n, e))
    m = np.array(cols, dtype=np.int64).T % field.p
    assert m.shape == (dim, dim)
    return m


def brute_orbits(p: int, n: int, e: int, budget: int = 10**6) -> BruteResult:
    """Partition of the exact-level-n points mod depth e into orbits under
    the full acting group, with the Galois order of every class."""
    field = FieldConfig.for_session(p, n)
    ell, d = field.ell, field.d
    if e == 0:
        return BruteResult(p, n, 0, {(): 0}, [1], [d * d], [()])
    if e > d:
        raise EnumerationBudget("digit quotient is not elementary past depth d")
    size = p ** (ell * e)
    if size > budget:
        raise EnumerationBudget(f"{size} points exceed the budget")
    j_level = quotient_level(field, n, e - 1).level
    unit_gens = [teichmuller(field), CycElem.zeta(field)]
    unit_gens += [
        padic_exp(CycElem.pi(field).pow(s)) for s in range(2, j_level)
    ]
    mats = [_gen_matrix(field, u, 0, n, e) for u in unit_gens]
    sigma_mat = _gen_matrix(field, None, 1, n, e)

    dim = ell * e
    powers = p ** np.arange(dim, dtype=np.int64)
    digits = np.zeros((size, dim), dtype=np.int64)
    idx = np.arange(size, dtype=np.int64)
    for k in range(dim):
        digits[:, k] = (idx // powers[k]) % p

    def apply_all(mat, rows):
        return (rows @ mat.T % p @ powers).astype(np.int64)

    images = [apply_all(m, digits) for m in mats]
    sigma_image = apply_all(sigma_mat, digits)

    # keep only exact-level points: some coordinate with leading digit != 0
    lead_cols = [j * e for j in range(ell)]
    in_delta = (digits[:, lead_cols] != 0).any(axis=1)

    unit_id = np.full(size, -1, dtype=np.int64)
    for s in range(size):
        if not in_delta[s] or unit_id[s] >= 0:
            continue
        unit_id[s] = s
        frontier = np.array([s], dtype=np.int64)
        while frontier.size:
            nxt = []
            for img in images:
                w = img[frontier]
                fresh = w[unit_id[w] < 0]
                if fresh.size:
                    unit_id[fresh] = s
                    nxt.append(fresh)
            frontier = np.concatenate(nxt) if nxt else np.array([], dtype=np.int64)

    # merge unit orbits along sigma
    parent = {}

    def find(v):
        while parent.get(v, v) != v:
            parent[v] = parent.get(parent[v], parent[v])
            v = parent[v]
        return v

    for s in np.nonzero(in_delta)[0]:
        a, b = find(int(unit_id[s])), find(int(unit_id[sigma_image[s]]))
        if a != b:
            parent[max(a, b)] = min(a, b)

    class_index = {}
    class_of = {}
    class_sizes = []
    class_reps = []
    keys = [tuple(row) for row in digits]
    for s in np.nonzero(in_delta)[0]:
        r = find(int(unit_id[s]))
        if r not in class_index:
            class_index[r] = len(class_index)
            class_sizes.append(0)
            class_reps.append(keys[s])
        ci = class_index[r]
        class_of[keys[s]] = ci
        class_sizes[ci] += 1

    # Galois order per class: h | gal iff the sigma^(d/h)-image of a
    # representative stays in the same unit-only orbit
    sigma_pows = [idx]
    cur = idx
    for _ in range(d):
        cur = sigma_image[cur]
        sigma_pows.append(cur)
    class_gal = []
    packed = (digits @ powers).astype(np.int64)
    pos_of = np.argsort(packed)  # identity, packed == idx
    for r, ci in sorted(class_index.items(), key=lambda kv: kv[1]):
        base = int(unit_id[r])
        gal = 1
        for h in range(d, 0, -1):
            if d % h:
                continue
            img = int(sigma_pows[d // h][r])
            if int(unit_id[img]) == base:
                gal = h
                break
        class_gal.append(gal)
    return BruteResult(p, n, e, class_of, class_sizes, class_gal, class_reps)


def skeleton_key(tree, node) -> tuple:
    """The oracle's canonical key of a skeleton node's parameter, computed
    through the pi-digit route."""
    return _digit_key(tree.field, node.param.coords(), tree.n, node.depth)


def diff_against_skeleton(tree, result: BruteResult):
    """Compare a depth-e oracle partition with the skeleton's classes.

    Returns a list of mismatch descriptions; empty means identical
    partition and identical Galois orders.
    """
    issues = []
    e = result.e
    ids = tree.by_depth[e]
    if len(ids) != len(result.class_sizes):
        issues.append(
            f"depth {e}: {len(ids)} skeleton classes vs "
            f"{len(result.class_sizes)} oracle classes"
        )
    seen = {}
    for nid in ids:
        node = tree.nodes[nid]
        key = skeleton_key(tree, node)
        ci = result.class_of.get(key)
        if ci is None:
            issues.append(f"node {nid}: parameter not an exact-level point")
            continue
        if ci in seen:
            issues.append(f"nodes {seen[ci]} and {nid} fell in one oracle class")
            continue
        seen[ci] = nid
        if result.class_gal[ci] != node.gal:
            issues.append(
                f"node {nid}: oracle Galois order {result.class_gal[ci]}"
                f" != skeleton {node.gal}"
            )
    return issues
