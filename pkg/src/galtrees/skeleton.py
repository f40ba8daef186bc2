"""Depth-by-depth construction of skeleton trees from orbit data.

A node at depth e is one isomorphism class: an orbit of parameters at
exact level n modulo the level-(n+e) sublattice.  Children enumerate the
affine stabilizer orbits on the next layer.  Full builds are feasible for
small instances only (class counts grow like p^((ell-1)e)); larger
sessions restrict to the sub-forest of prescribed Galois orders, which is
upward closed because a child's order divides its parent's.
"""

from dataclasses import dataclass, field as dfield

from .cyclo import FieldConfig
from .errors import InternalInconsistency
from .lattice import ParamPoint, add_layer, eigen_basis, zero_point
from .action import (
    ActorContext,
    LayerScan,
    Stabilizer,
    root_stabilizer,
    stab_galois_order,
)


@dataclass
class SkeletonNode:
    node_id: str
    depth: int
    param: ParamPoint
    gal: int
    parent: str | None
    children: list = dfield(default_factory=list)
    stab: Stabilizer | None = None
    tree_id: int = -1
    incr: tuple | None = None  # layer digits added at the parent


@dataclass
class SkeletonTree:
    p: int
    n: int
    max_depth: int
    field: FieldConfig
    actx: ActorContext
    nodes: dict
    by_depth: list
    allowed_orders: frozenset | None = None

    @property
    def root(self) -> SkeletonNode:
        return self.nodes["0:0"]

    def in_tree_children(self, node: SkeletonNode):
        return [
            c for cid in node.children
            if (c := self.nodes[cid]).tree_id == node.tree_id
        ]

    def node_count(self) -> int:
        return len(self.nodes)


def session_context(p: int, n: int, max_depth: int):
    field = FieldConfig.for_session(p, n)
    if n < max(field.c, 8) or n < p:
        raise ValueError(f"lattice level n={n} too small for p={p}")
    if not (0 <= max_depth <= n - field.c):
        raise ValueError(f"max_depth must lie in 0..{n - field.c}")
    basis = eigen_basis(field)
    actx = ActorContext(field, basis, n, max_depth)
    return field, actx


def build_skeleton(p: int, n: int, max_depth: int, allowed_orders=None,
                   budget: int = 10**6) -> SkeletonTree:
    """Build the skeleton to the given depth.

    allowed_orders, when given, prunes to nodes whose Galois order lies in
    the set; descendants of dropped nodes can never re-enter it, so the
    pruned forest is complete for those orders.
    """
    field, actx = session_context(p, n, max_depth)
    allowed = frozenset(allowed_orders) if allowed_orders is not None else None
    root = SkeletonNode("0:0", 0, zero_point(field, n), field.d**2, None,
                        stab=root_stabilizer(actx), tree_id=0)
    nodes = {root.node_id: root}
    by_depth = [[root.node_id]]
    next_tree = 1
    for e in range(max_depth):
        level_ids = []
        counter = 0
        for nid in by_depth[e]:
            node = nodes[nid]
            scan = LayerScan(actx, node.stab, node.param, e, budget)
            for rep in scan.orbit_reps:
                digs = scan.unpack(rep)
                if e == 0 and not any(digs):
                    continue  # children must lie at exact level n
                gal = scan.point_galois_order(rep)
                if e == 0 and node.stab.omega_full is False:
                    raise InternalInconsistency("root lost its omega part")
                if allowed is not None and gal not in allowed:
                    continue
                will_expand = e + 1 < max_depth
                stab = scan.refine(rep) if will_expand else None
                if stab is not None and stab_galois_order(stab) != gal:
                    raise InternalInconsistency(
                        "stabilizer image order disagrees with orbit test"
                    )
                child_id = f"{e + 1}:{counter}"
                counter += 1
                if node.depth >= 1 and gal == node.gal:
                    tree_id = node.tree_id
                else:
                    tree_id = next_tree
                    next_tree += 1
                child = SkeletonNode(
                    child_id, e + 1, add_layer(node.param, digs, e), gal,
                    nid, stab=stab, tree_id=tree_id, incr=digs,
                )
                nodes[child_id] = child
                node.children.append(child_id)
                level_ids.append(child_id)
        by_depth.append(level_ids)
    return SkeletonTree(p, n, max_depth, field, actx, nodes, by_depth, allowed)


def node_galois_order(tree: SkeletonTree, node: SkeletonNode) -> int:
    """Galois order of a node, re-derived from a fresh orbit scan of its
    parent and compared with the stored value."""
    if node.parent is None:
        return node.gal
    parent = tree.nodes[node.parent]
    if parent.stab is None:
        return node.gal
    scan = LayerScan(tree.actx, parent.stab, parent.param, parent.depth)
    v = scan.pack(node.incr)
    gal = scan.point_galois_order(v)
    if gal != node.gal:
        raise InternalInconsistency("stored Galois order disagrees with rescan")
    return gal
