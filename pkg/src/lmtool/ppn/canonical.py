"""Structural equivalence: canonicalization of contraction/weakening
placement and anchored graph isomorphism of proof structures.

Canonicalization applies: associativity of contractions (flattened to
n-ary nodes), neutrality of weakening into contraction, permeability of
contractions across box doors (normalized outward), hoisting and removal
of final weakenings (chains of doors ending in a net conclusion), and the
weakening-into-contraction absorption across doors used for renaming
boxes."""

from __future__ import annotations

from itertools import count
from typing import Optional

from .net import Net


def struct_canon(net: Net) -> Net:
    out = net.copy()
    changed = True
    guard = 0
    while changed:
        guard += 1
        if guard > 10000:
            raise RuntimeError("structural canonicalization did not settle")
        changed = False
        for level in list(out.all_nets()):
            if _flatten_contractions(level):
                changed = True
                break
            if _cancel_weakenings(level):
                changed = True
                break
            if _contractions_out_of_boxes(level):
                changed = True
                break
            if _weakening_doors_into_contractions(level):
                changed = True
                break
        if not changed and _prune_final_weakenings(out):
            changed = True
    return out


def _flatten_contractions(level: Net) -> bool:
    for n in list(level.nodes.values()):
        if n.kind != "c":
            continue
        for i, w in enumerate(list(n.ups)):
            pn, _ = level.producer_of(w)
            child = level.nodes[pn]
            if child.kind == "c":
                n.ups[i: i + 1] = child.ups
                level.drop_node(child.nid)
                level.drop_wire(w)
                return True
    return False


def _cancel_weakenings(level: Net) -> bool:
    # a weakening feeding a contraction premise is dropped
    for n in list(level.nodes.values()):
        if n.kind != "c":
            continue
        for i, w in enumerate(list(n.ups)):
            pn, _ = level.producer_of(w)
            if level.nodes[pn].kind == "w":
                level.drop_node(pn)
                level.drop_wire(w)
                n.ups.pop(i)
                if len(n.ups) == 1:
                    level.redirect_consumer(n.downs[0], n.ups[0])
                    level.drop_node(n.nid)
                return True
    return False


def _contractions_out_of_boxes(level: Net) -> bool:
    for b in level.boxes():
        inner = b.contents
        for i in range(1, len(inner.conclusions)):
            iw, anchor = inner.conclusions[i]
            pn, _ = inner.producer_of(iw)
            node = inner.nodes[pn]
            if node.kind != "c":
                continue
            # the k premises become k doors; a contraction outside takes over
            k = len(node.ups)
            inner.drop_node(node.nid)
            inner.wires.pop(iw, None)
            inner.conclusions[i: i + 1] = [(w, anchor) for w in node.ups]
            f = level.wires[b.downs[i]]
            new_outer = [level.new_wire(f) for _ in range(k)]
            old_outer = b.downs[i]
            b.downs[i: i + 1] = new_outer
            c = level.add("c", new_outer, [f])
            level.redirect_consumer(old_outer, c.downs[0])
            return True
    return False


def _weakening_chain(level: Net, wire: int) -> Optional[list]:
    """If the producer chain of wire (through aux doors) ends at a
    weakening, return the removal plan [(net, kind, payload), ...]."""
    pn, port = level.producer_of(wire)
    node = level.nodes[pn]
    if node.kind == "w":
        return [(level, "w", pn)]
    if node.kind == "box" and port > 0:
        inner = node.contents
        iw = inner.conclusions[port][0]
        rest = _weakening_chain(inner, iw)
        if rest is not None:
            return rest + [(level, "door", (pn, port))]
    return None


def _apply_chain(plan: list) -> None:
    # inner steps run first; dropping a wire also clears its conclusion
    # entry, so each door step only pops its own outer port
    for net, kind, payload in plan:
        if kind == "w":
            node = net.nodes[payload]
            net.drop_wire(node.downs[0])
            net.drop_node(payload)
        else:
            bnid, port = payload
            b = net.nodes[bnid]
            w = b.downs.pop(port)
            net.drop_wire(w)


def _weakening_doors_into_contractions(level: Net) -> bool:
    # absorption beyond the five core identities: a contraction premise
    # whose producer chain is a weakening behind box doors cancels like a
    # plain weakening (needed to align renaming boxes; checked by the
    # soundness suite)
    for n in list(level.nodes.values()):
        if n.kind != "c":
            continue
        for i, w in enumerate(list(n.ups)):
            pn, port = level.producer_of(w)
            if level.nodes[pn].kind != "box" or port == 0:
                continue
            plan = _weakening_chain(level, w)
            if plan is None:
                continue
            _apply_chain(plan)
            n.ups.pop(i)
            if len(n.ups) == 1:
                level.redirect_consumer(n.downs[0], n.ups[0])
                level.drop_node(n.nid)
            return True
    return False


def _prune_final_weakenings(net: Net) -> bool:
    # a top-level conclusion produced by a weakening chain disappears
    for w, _anchor in list(net.conclusions):
        plan = _weakening_chain(net, w)
        if plan is not None:
            _apply_chain(plan)
            return True
    return False


# ---------------------------------------------------------------------------
# Anchored isomorphism via a flattened labeled graph


_ORDERED_PORTS = {
    "tensor": True,
    "par": True,
    "d": True,
}


def _flatten(net: Net):
    """Nodes with colors plus labeled edges; boxes contribute door nodes so
    that the through-the-membrane pairing is part of the graph."""
    nodes: dict[str, tuple] = {}
    edges: list[tuple[str, str, tuple]] = []
    ctr = count()

    def visit(level: Net, depth: int, prefix: str):
        gid = {}
        doors = {}
        for nid, n in level.nodes.items():
            g = f"{prefix}n{nid}"
            gid[nid] = g
            nodes[g] = ("node", n.kind, depth, len(n.ups))
            if n.kind == "box":
                for i in range(len(n.downs)):
                    dg = f"{prefix}n{nid}door{i}"
                    doors[(nid, i)] = dg
                    nodes[dg] = ("door", i == 0, depth)
                    edges.append((dg, g, ("door-of", i == 0)))
                inner_gid = visit(n.contents, depth + 1, f"{prefix}n{nid}b")
                for i, (iw, _) in enumerate(n.contents.conclusions):
                    ip, iport = n.contents.producer_of(iw)
                    src = _port_src(n.contents, ip, iport, inner_gid, prefix=f"{prefix}n{nid}b")
                    edges.append(
                        (src, doors[(nid, i)], _edge_label(n.contents, ip, iport, iw, "in"))
                    )
        # wires at this level
        for nid, n in level.nodes.items():
            for pidx, w in enumerate(n.downs):
                src = _port_src(level, nid, pidx, gid, prefix)
                cons = level.consumer_of(w)
                label = _edge_label(level, nid, pidx, w, "mid")
                if cons is not None:
                    cn, cport = cons
                    dst = gid[cn]
                    tag = _up_tag(level.nodes[cn], cport)
                    edges.append((src, dst, label + (tag,)))
                else:
                    anchor = level.conclusion_anchor(w)
                    if anchor is None or depth > 0:
                        # inner conclusions are box doors, already wired
                        continue
                    cg = f"{prefix}conc{w}"
                    nodes[cg] = ("conc", anchor, depth)
                    edges.append((src, cg, label + ("conc",)))
        # redirect box-produced wires to their door nodes
        return gid

    def _port_src(level: Net, nid: int, pidx: int, gid, prefix: str) -> str:
        n = level.nodes[nid]
        if n.kind == "box":
            return f"{prefix}n{nid}door{pidx}"
        return gid[nid]

    def _edge_label(level: Net, nid: int, pidx: int, w: int, where: str) -> tuple:
        n = level.nodes[nid]
        if n.kind in _ORDERED_PORTS or n.kind == "ax":
            down_tag = (n.kind, pidx)
        elif n.kind == "box":
            down_tag = ("boxd",)
        else:
            down_tag = (n.kind + "d",)
        return (str(level.wires[w]), down_tag)

    def _up_tag(n, cport: int) -> tuple:
        if n.kind in _ORDERED_PORTS:
            return (n.kind + "u", cport)
        return (n.kind + "u",)

    visit(net, 0, "")
    return nodes, edges


def _refine(nodes: dict, edges: list, rounds: int = 4) -> dict:
    colors = {g: hash(c) for g, c in nodes.items()}
    adj: dict[str, list] = {g: [] for g in nodes}
    for a, b, lbl in edges:
        adj[a].append(("out", lbl, b))
        adj[b].append(("inc", lbl, a))
    for _ in range(rounds):
        new = {}
        for g in nodes:
            sig = sorted((d, lbl, colors[o]) for d, lbl, o in adj[g])
            new[g] = hash((colors[g], tuple(sig)))
        if new == colors:
            break
        colors = new
    return colors


def net_signature(net: Net) -> tuple:
    """A stable invariant of the canonicalized net (not a complete
    canonical form; used for quick inequality checks and hashing)."""
    sc = struct_canon(net)
    nodes, edges = _flatten(sc)
    colors = _refine(nodes, edges)
    hist = sorted((nodes[g][0:2], colors[g]) for g in nodes)
    return tuple(hist)


def _isomorphic(nodes1, edges1, nodes2, edges2) -> bool:
    if len(nodes1) != len(nodes2) or len(edges1) != len(edges2):
        return False
    c1 = _refine(nodes1, edges1)
    c2 = _refine(nodes2, edges2)
    from collections import Counter

    if Counter(c1.values()) != Counter(c2.values()):
        return False
    if Counter(nodes1.values()) != Counter(nodes2.values()):
        return False

    adj1: dict[str, list] = {g: [] for g in nodes1}
    for a, b, lbl in edges1:
        adj1[a].append(("out", lbl, b))
        adj1[b].append(("inc", lbl, a))
    adj2: dict[str, list] = {g: [] for g in nodes2}
    for a, b, lbl in edges2:
        adj2[a].append(("out", lbl, b))
        adj2[b].append(("inc", lbl, a))

    order = sorted(nodes1, key=lambda g: (sum(1 for h in nodes1 if c1[h] == c1[g]), g))
    mapping: dict[str, str] = {}
    used: set[str] = set()

    def feasible(g1: str, g2: str) -> bool:
        if c1[g1] != c2[g2] or nodes1[g1] != nodes2[g2]:
            return False
        want = sorted(
            (d, lbl, mapping[o]) for d, lbl, o in adj1[g1] if o in mapping
        )
        have_all = adj2[g2]
        have = sorted(
            (d, lbl, o) for d, lbl, o in have_all if o in used
        )
        return want == have

    def solve(i: int) -> bool:
        if i == len(order):
            return True
        g1 = order[i]
        for g2 in nodes2:
            if g2 in used:
                continue
            if feasible(g1, g2):
                mapping[g1] = g2
                used.add(g2)
                if solve(i + 1):
                    return True
                del mapping[g1]
                used.remove(g2)
        return False

    return solve(0)


def net_equiv(n1: Net, n2: Net) -> bool:
    """Structural equality: canonical forms compared up to an isomorphism
    anchored at the labeled conclusions."""
    s1 = struct_canon(n1)
    s2 = struct_canon(n2)
    nodes1, edges1 = _flatten(s1)
    nodes2, edges2 = _flatten(s2)
    return _isomorphic(nodes1, edges1, nodes2, edges2)
