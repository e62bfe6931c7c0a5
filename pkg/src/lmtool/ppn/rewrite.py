"""Cut elimination.

Multiplicative rules: an axiom against anything fuses wires; a par against
a tensor splits into two cuts.  Exponential rules erase, open, duplicate
or absorb boxes and tensor-trees (a tensor-tree is a box, an axiom, or a
tensor of a box and a tensor-tree; it is the translation image of a
stack and behaves like a box)."""

from __future__ import annotations

import random
from typing import Optional

from .net import Net, Node

MULT = ("ax", "parten")
EXP = ("wk", "der", "con", "absorb")


class NoRuleError(Exception):
    pass


class NetBudgetExhausted(Exception):
    pass


# ---------------------------------------------------------------------------
# Redex discovery


def _cut_rule(net: Net, cut: Node) -> Optional[tuple[str, int]]:
    """Which rule fires on this cut; the int picks the axiom side for 'ax'."""
    w0, w1 = cut.ups
    for i, w in enumerate((w0, w1)):
        n, _ = net.producer_of(w)
        if net.nodes[n].kind == "ax":
            return ("ax", i)
    k0 = net.nodes[net.producer_of(w0)[0]].kind
    k1 = net.nodes[net.producer_of(w1)[0]].kind
    if {k0, k1} == {"par", "tensor"}:
        return ("parten", 0 if k0 == "par" else 1)
    # exponential: find the negative side by its producer kind
    for i, w in enumerate((w0, w1)):
        n, port = net.producer_of(w)
        kind = net.nodes[n].kind
        if kind == "w":
            return ("wk", i)
        if kind == "d":
            return ("der", i)
        if kind == "c":
            return ("con", i)
        if kind == "box" and port > 0:
            return ("absorb", i)
    return None


def find_redex(net: Net, skip: int = 0) -> Optional[tuple[Net, Node, str, int]]:
    """The first (or skip-th) cut with an applicable rule, searching this
    net and box contents."""
    found = 0
    for level in net.all_nets():
        for cut in sorted(level.cuts(), key=lambda n: n.nid):
            r = _cut_rule(level, cut)
            if r is not None:
                if found == skip:
                    return level, cut, r[0], r[1]
                found += 1
    return None


def find_mult_redex(net: Net, skip: int = 0) -> Optional[tuple[Net, Node, str, int]]:
    found = 0
    for level in net.all_nets():
        for cut in sorted(level.cuts(), key=lambda n: n.nid):
            r = _cut_rule(level, cut)
            if r is not None and r[0] in MULT:
                if found == skip:
                    return level, cut, r[0], r[1]
                found += 1
    return None


# ---------------------------------------------------------------------------
# Tensor-trees


def tensor_tree(net: Net, root_wire: int) -> Optional[tuple[list[int], list[int]]]:
    """The tensor-tree rooted at root_wire: (node ids, interface wires).
    Interface wires are produced by tree nodes but point outside the tree
    (box auxiliary doors and the result wire of the final axiom)."""
    nodes: list[int] = []
    interface: list[int] = []

    def go(w: int) -> bool:
        nid, port = net.producer_of(w)
        n = net.nodes[nid]
        if n.kind == "box" and port == 0:
            nodes.append(nid)
            interface.extend(n.downs[1:])
            return True
        if n.kind == "ax":
            nodes.append(nid)
            other = n.downs[1 - port]
            interface.append(other)
            return True
        if n.kind == "tensor" and port == 0:
            nodes.append(nid)
            return go(n.ups[0]) and go(n.ups[1])
        return False

    if not go(root_wire):
        return None
    return nodes, interface


def _copy_tree(net: Net, nodes: list[int], interface: list[int]) -> tuple[int, dict[int, int]]:
    """Duplicate the tree; returns the new root wire and the map from old
    interface wires to the copies'."""
    # build a temporary net holding just the tree, then absorb a copy
    tree_wires: set[int] = set()
    for nid in nodes:
        n = net.nodes[nid]
        tree_wires.update(n.downs)
        tree_wires.update(n.ups)
    piece = Net()
    idmap: dict[int, int] = {}
    for w in sorted(tree_wires):
        idmap[w] = piece.new_wire(net.wires[w])
    for nid in nodes:
        n = net.nodes[nid]
        n2 = Node(
            piece._new_id(),
            n.kind,
            [idmap[w] for w in n.ups],
            [idmap[w] for w in n.downs],
            n.contents.copy() if n.contents is not None else None,
        )
        piece.nodes[n2.nid] = n2
    _, wmap2 = net.absorb(piece)
    return wmap2, idmap


def duplicate_tree(net: Net, nodes: list[int], interface: list[int], root_wire: int):
    wmap2, idmap = _copy_tree(net, nodes, interface)
    new_root = wmap2[idmap[root_wire]]
    new_interface = [wmap2[idmap[w]] for w in interface]
    return new_root, new_interface


def delete_tree(net: Net, nodes: list[int]) -> None:
    for nid in nodes:
        n = net.nodes[nid]
        for w in n.downs:
            net.drop_wire(w)
        net.drop_node(nid)
    # internal up-wires of deleted tensors were down-wires of other tree
    # nodes, already dropped


# ---------------------------------------------------------------------------
# The rules


def fire(net: Net, level: Net, cut: Node, rule: str, side: int) -> None:
    w_this = cut.ups[side]
    w_other = cut.ups[1 - side]
    match rule:
        case "ax":
            nid, port = level.producer_of(w_this)
            ax = level.nodes[nid]
            w_tail = ax.downs[1 - port]
            if w_tail == w_other:
                raise NoRuleError("axiom cut on itself (cyclic net)")
            level.drop_node(cut.nid)
            level.drop_node(ax.nid)
            level.drop_wire(w_this)
            # the other cut wire takes over the tail's consumer
            level.redirect_consumer(w_tail, w_other)
        case "parten":
            par = level.nodes[level.producer_of(w_this)[0]]
            ten = level.nodes[level.producer_of(w_other)[0]]
            level.drop_node(cut.nid)
            level.add("cut", [par.ups[0], ten.ups[0]], [])
            level.add("cut", [par.ups[1], ten.ups[1]], [])
            level.drop_node(par.nid)
            level.drop_node(ten.nid)
            level.drop_wire(w_this)
            level.drop_wire(w_other)
        case "wk":
            wnode = level.nodes[level.producer_of(w_this)[0]]
            tree = tensor_tree(level, w_other)
            if tree is None:
                raise NoRuleError("weakening cut against a non-tree")
            nodes, interface = tree
            level.drop_node(cut.nid)
            level.drop_node(wnode.nid)
            level.drop_wire(w_this)
            # replace every interface wire by a weakening before deleting,
            # preserving conclusion positions (they may be box doors)
            for w in interface:
                nw = level.add("w", [], [level.wires[w]]).downs[0]
                c = level.consumer_of(w)
                if c is not None:
                    level.nodes[c[0]].ups[c[1]] = nw
                else:
                    level.conclusions = [
                        (nw if cw == w else cw, a) for cw, a in level.conclusions
                    ]
            delete_tree(level, nodes)
        case "der":
            dnode = level.nodes[level.producer_of(w_this)[0]]
            bnid, port = level.producer_of(w_other)
            box = level.nodes[bnid]
            if box.kind != "box" or port != 0:
                raise NoRuleError("dereliction cut against a non-box")
            _, wmap = level.absorb(box.contents)
            inner = box.contents
            level.drop_node(cut.nid)
            level.drop_node(dnode.nid)
            level.drop_node(box.nid)
            # principal: cut the dereliction premise against the contents'
            # distinguished conclusion
            level.add("cut", [dnode.ups[0], wmap[inner.conclusions[0][0]]], [])
            level.drop_wire(w_this)
            level.drop_wire(w_other)
            # auxiliary doors: the inner conclusion wire replaces the outer
            for (iw, _), ow in zip(inner.conclusions[1:], box.downs[1:]):
                level.redirect_consumer(ow, wmap[iw])
        case "con":
            cnode = level.nodes[level.producer_of(w_this)[0]]
            tree = tensor_tree(level, w_other)
            if tree is None:
                raise NoRuleError("contraction cut against a non-tree")
            nodes, interface = tree
            k = len(cnode.ups)
            copies = [(w_other, interface)]
            for _ in range(k - 1):
                copies.append(duplicate_tree(level, nodes, interface, w_other))
            level.drop_node(cut.nid)
            level.drop_wire(w_this)
            for prem, (root, _) in zip(cnode.ups, copies):
                level.add("cut", [prem, root], [])
            level.drop_node(cnode.nid)
            # contract the interface copies onto the original consumers
            for i, w in enumerate(interface):
                group = [copies[j][1][i] for j in range(k)]
                c = level.consumer_of(w)
                anchor = level.conclusion_anchor(w)
                nc = level.add("c", group, [level.wires[w]])
                # the original wire w is group[0]; its old consumer must now
                # consume the contraction output
                if c is not None:
                    level.nodes[c[0]].ups[c[1]] = nc.downs[0]
                elif anchor is not None:
                    level.conclusions = [
                        (nc.downs[0] if cw == w else cw, a)
                        for cw, a in level.conclusions
                    ]
        case "absorb":
            bnid, port = level.producer_of(w_this)
            host = level.nodes[bnid]
            tree = tensor_tree(level, w_other)
            if tree is None:
                raise NoRuleError("door cut against a non-tree")
            nodes, interface = tree
            inner = host.contents
            # move the tree inside the host box
            piece = Net()
            tree_wires: set[int] = set()
            for nid in nodes:
                n = level.nodes[nid]
                tree_wires.update(n.downs)
            idmap = {w: piece.new_wire(level.wires[w]) for w in sorted(tree_wires)}
            for nid in nodes:
                n = level.nodes[nid]
                n2 = Node(
                    piece._new_id(),
                    n.kind,
                    [idmap[w] for w in n.ups],
                    [idmap[w] for w in n.downs],
                    n.contents,
                )
                piece.nodes[n2.nid] = n2
            _, wmap = inner.absorb(piece)
            # the cut moves inside: door wire w_this pairs conclusions[port]
            iw = inner.conclusions[port][0]
            inner.add("cut", [iw, wmap[idmap[w_other]]], [])
            inner.conclusions.pop(port)
            level.drop_node(cut.nid)
            host.downs.pop(port)
            level.drop_wire(w_this)
            # tree interface wires become new doors of the host box
            consumers = {w: level.consumer_of(w) for w in interface}
            anchors = {w: level.conclusion_anchor(w) for w in interface}
            for nid in nodes:
                level.drop_node(nid)
            for w in sorted(tree_wires):
                if w in interface:
                    continue
                level.drop_wire(w)
            for w in interface:
                inner.conclusions.append((wmap[idmap[w]], ("door",)))
                host.downs.append(w)
        case _:
            raise NoRuleError(rule)


# ---------------------------------------------------------------------------
# Normalization drivers


def mult_nf(net: Net, budget: int = 20000, rng: Optional[random.Random] = None) -> Net:
    """Fixpoint of the axiom and par/tensor cut rules (confluent and
    terminating); the input net is not modified."""
    out = net.copy()
    for _ in range(budget):
        n_red = _count_mult(out)
        if n_red == 0:
            return out
        skip = rng.randrange(n_red) if rng is not None else 0
        level, cut, rule, side = find_mult_redex(out, skip)
        fire(out, level, cut, rule, side)
    raise NetBudgetExhausted("multiplicative normalization budget exhausted")


def _count_mult(net: Net) -> int:
    n = 0
    for level in net.all_nets():
        for cut in level.cuts():
            r = _cut_rule(level, cut)
            if r is not None and r[0] in MULT:
                n += 1
    return n


def exp_step(net: Net, cut_id: int) -> Net:
    """Fire the (unique) rule of the given cut; returns a new net."""
    out = net.copy()
    # cut ids are not stable across copy; locate by position instead
    ids = [c.nid for level in net.all_nets() for c in sorted(level.cuts(), key=lambda n: n.nid)]
    if cut_id not in ids:
        raise NoRuleError(f"no cut {cut_id}")
    index = ids.index(cut_id)
    cuts = [
        (level, c)
        for level in out.all_nets()
        for c in sorted(level.cuts(), key=lambda n: n.nid)
    ]
    level, cut = cuts[index]
    r = _cut_rule(level, cut)
    if r is None:
        raise NoRuleError("cut does not match any rule")
    fire(out, level, cut, r[0], r[1])
    return out


def full_nf(net: Net, budget: int = 20000, rng: Optional[random.Random] = None) -> Net:
    """Normal form under all cut-elimination rules (confluent and strongly
    normalizing on translated nets)."""
    out = net.copy()
    for _ in range(budget):
        total = _count_all(out)
        if total == 0:
            return out
        skip = rng.randrange(total) if rng is not None else 0
        found = find_redex(out, skip)
        level, cut, rule, side = found
        fire(out, level, cut, rule, side)
    raise NetBudgetExhausted("cut elimination budget exhausted")


def _count_all(net: Net) -> int:
    n = 0
    for level in net.all_nets():
        for cut in level.cuts():
            if _cut_rule(level, cut) is not None:
                n += 1
    return n
