"""The structural equivalence on canonical forms (axioms exs, exr, lin,
pp, rho, theta), its renaming extension (axiom ren), a bounded decision
procedure, and replayable certificates."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from .meta import apply_stack, rename, stack_of
from .reduction import canon, is_canonical
from .syntax import (
    Abs,
    App,
    EmptyStack,
    ERepl,
    ESub,
    Mu,
    Named,
    NameSupply,
    Object,
    Var,
    alpha_eq,
    binders_along,
    canonical_key,
    count_free_name,
    count_free_var,
    empty_stack,
    free_names,
    free_vars,
    make_path,
    positions,
    print_object,
    rename_free_name_var,
    rename_free_var,
    rewrite_at,
    sort_of,
    subobject_at,
    supply_for,
)
from .reduction import is_linear_indices

AXIOMS = ("exs", "exr", "lin", "pp", "rho", "theta")
REN_AXIOM = "ren"

_REN_SUBSET_CAP = 6


@dataclass(frozen=True)
class Axiom:
    """One axiom application: name, orientation, position, and the
    alpha-canonical key of the expected result (which pins down the instance
    when several rewrites share a position)."""

    name: str
    orientation: str  # "LR" | "RL"
    path: tuple[int, ...]
    result_key: Optional[tuple] = None

    def render(self) -> str:
        arrow = "+" if self.orientation == "LR" else "-"
        return f"{self.name}{arrow} @ {'.'.join(map(str, self.path)) or 'root'}"


@dataclass
class Certificate:
    steps: list[Axiom] = field(default_factory=list)

    def render(self) -> str:
        return "\n".join(st.render() for st in self.steps) or "(reflexivity)"


@dataclass
class EquivOutcome:
    status: str  # "equivalent" | "not-within-bounds"
    certificate: Optional[Certificate] = None
    states: int = 0

    @property
    def equivalent(self) -> bool:
        return self.status == "equivalent"


class NotCanonical(Exception):
    pass


# ---------------------------------------------------------------------------
# Rewrites of a subobject by one axiom


def _linear_positions(o: Object, want_sort: str):
    for idxs, sub in positions(o):
        if idxs and sort_of(sub) == want_sort and is_linear_indices(o, idxs):
            yield idxs, sub


def _subtree_rewrites(sub: Object, supply: NameSupply, include_ren: bool,
                      expansive: bool = True):
    """Yield (axiom, orientation, new_subobject) for rewrites rooted at sub."""
    out: list[tuple[str, str, Object]] = []

    match sub:
        case ESub(t, x, u):
            # exs LR: (LTT<v>)[x\u] -> LTT<v[x\u]>
            for idxs, v in _linear_positions(t, "term"):
                vs, ns = binders_along(t, make_path(t, idxs))
                if x in vs:
                    continue
                if count_free_var(x, t) != count_free_var(x, v):
                    continue
                res = rewrite_at(t, make_path(t, idxs), ESub(v, x, u), supply)
                out.append(("exs", "LR", res))
        case ERepl(c, nn, on, ann, s):
            # exr LR: (LCC<c0>)[a'/a\s] -> LCC<c0[a'/a\s]>
            for idxs, c0 in _linear_positions(c, "command"):
                vs, ns = binders_along(c, make_path(c, idxs))
                if on in ns:
                    continue
                if count_free_name(on, c) != count_free_name(on, c0):
                    continue
                res = rewrite_at(c, make_path(c, idxs), ERepl(c0, nn, on, ann, s), supply)
                out.append(("exr", "LR", res))

    if sort_of(sub) == "term":
        # exs RL: LTT<v[x\u]> -> (LTT<v>)[x\u]
        for idxs, node in _linear_positions(sub, "term"):
            if not isinstance(node, ESub):
                continue
            t2, x, u = node.body, node.var, node.arg
            vs, ns = binders_along(sub, make_path(sub, idxs))
            if (free_vars(u) & vs) or (free_names(u) & ns):
                continue  # the substitution body cannot move out
            if count_free_var(x, sub) > 0:
                x2 = supply.fresh(x)
                t2, x = rename_free_var(t2, x, x2), x2
            res = ESub(rewrite_at(sub, make_path(sub, idxs), t2, supply), x, u)
            out.append(("exs", "RL", res))

    if sort_of(sub) == "command":
        # exr RL: LCC<c0[a'/a\s]> -> (LCC<c0>)[a'/a\s]
        for idxs, node in _linear_positions(sub, "command"):
            if not isinstance(node, ERepl):
                continue
            c0, nn, on, ann, s = node.body, node.new, node.old, node.ann, node.stack
            vs, ns = binders_along(sub, make_path(sub, idxs))
            if (free_vars(s) & vs) or (free_names(s) & ns) or nn in ns:
                continue
            if count_free_name(on, sub) > 0:
                on2 = supply.fresh(on)
                c0, on = rename_free_name_var(c0, on, on2), on2
            res = ERepl(rewrite_at(sub, make_path(sub, idxs), c0, supply), nn, on, ann, s)
            out.append(("exr", "RL", res))

    match sub:
        # lin LR: ([a]u)[a'/a\s] -> [a'](u``s), a # u, s != #.  The subject
        # must be stack-inert (not an abstraction or mu under substitution
        # frames): otherwise the right side acquires meaningful redexes the
        # left cannot mirror and the strong bisimulation breaks.
        case ERepl(Named(a, u), nn, on, _, s) if (
            a == on
            and not isinstance(s, EmptyStack)
            and count_free_name(on, u) == 0
            and _stack_inert(u)
        ):
            out.append(("lin", "LR", Named(nn, canon(apply_stack(u, s), supply))))
    match sub:
        # lin RL: split the application spine (heads of canonical spines are
        # inert by canonicity)
        case Named(nn, w) if expansive:
            spine = _app_spine(w)
            for k in range(1, len(spine)):
                u = _rebuild_spine(spine[0], spine[1: len(spine) - k])
                rest = spine[len(spine) - k:]
                if not _stack_inert(u):
                    continue
                a = supply.fresh("'a")
                out.append(
                    ("lin", "RL", ERepl(Named(a, u), nn, a, None, stack_of(rest)))
                )
    match sub:
        # pp: [a'](\x. mu a. [b'](\y. mu b. u)) both ways
        case Named(a2, Abs(x, annx, Mu(a, anna, Named(b2, Abs(y, anny, Mu(b, annb, u)))))) if (
            a != b2 and a2 != b and a != b and x != y
        ):
            swapped = Named(
                b2, Abs(y, anny, Mu(b, annb, Named(a2, Abs(x, annx, Mu(a, anna, u)))))
            )
            out.append(("pp", "LR", swapped))
            out.append(("pp", "RL", swapped))
    match sub:
        # rho LR: [a] mu b. c -> c[a/b\#]
        case Named(a, Mu(b, annb, cbody)) if a != b:
            out.append(("rho", "LR", ERepl(cbody, a, b, annb, empty_stack())))
    match sub:
        # rho RL: c[a/b\#] -> [a] mu b. c
        case ERepl(cbody, a, b, annb, EmptyStack()):
            out.append(("rho", "RL", Named(a, Mu(b, annb, cbody))))
    match sub:
        # theta LR: mu a. [a]t -> t, a # t
        case Mu(a, _, Named(a2, tb)) if a == a2 and count_free_name(a, tb) == 0:
            out.append(("theta", "LR", tb))
    if expansive and sort_of(sub) == "term":
        a = supply.fresh("'a")
        out.append(("theta", "RL", Mu(a, None, Named(a, sub))))

    if include_ren:
        match sub:
            # ren LR: c[a/b\#] -> rename(c, a, b)
            case ERepl(cbody, a, b, _, EmptyStack()):
                out.append(("ren", "LR", rename(cbody, a, b)))
        if expansive and sort_of(sub) == "command":
            # ren RL: pick a free name and push a subset of its occurrences
            # under a fresh explicit renaming
            for a in sorted(free_names(sub)):
                occs = _name_occurrences(sub, a)
                if len(occs) > _REN_SUBSET_CAP:
                    occs = occs[:_REN_SUBSET_CAP]
                b = supply.fresh("'b")
                for r in range(0, len(occs) + 1):
                    for chosen in combinations(occs, r):
                        body = _rename_occurrences(sub, a, b, set(chosen))
                        out.append(("ren", "RL", ERepl(body, a, b, None, empty_stack())))
    return out


def _stack_inert(u: Object) -> bool:
    """The lin subject must stay passive under the incoming stack: its
    projection is a variable-headed application spine.  Projections are
    untouched by the meaningful rules, so the predicate is stable along
    reduction; syntactic checks (no abstraction/mu core) are not, because a
    substitution step may uncover an abstraction."""
    from .lmu import project

    h = project(u)
    while isinstance(h, App):
        h = h.fun
    return isinstance(h, Var)


def _app_spine(t: Object) -> list[Object]:
    parts = []
    while isinstance(t, App):
        parts.append(t.arg)
        t = t.fun
    parts.append(t)
    parts.reverse()
    return parts


def _rebuild_spine(head: Object, args: list[Object]) -> Object:
    for a in args:
        head = App(head, a)
    return head


def _name_occurrences(o: Object, alpha: str) -> list[tuple[int, ...]]:
    """Index paths of the free occurrences of alpha (Named nodes and
    replacement names)."""
    out = []

    def go(o: Object, idxs, shadowed: bool):
        match o:
            case Named(a, b):
                if a == alpha and not shadowed:
                    out.append(idxs)
                go(b, idxs + (0,), shadowed)
            case ERepl(b, nn, on, _, s):
                if nn == alpha and not shadowed:
                    out.append(idxs)
                go(b, idxs + (0,), shadowed or on == alpha)
                go(s, idxs + (1,), shadowed)
            case Mu(a, _, b):
                go(b, idxs + (0,), shadowed or a == alpha)
            case _:
                from .syntax import children

                for i, ch in enumerate(children(o)):
                    go(ch, idxs + (i,), shadowed)

    go(o, (), False)
    return out


def _rename_occurrences(o: Object, frm: str, to: str, chosen: set[tuple[int, ...]]) -> Object:
    def go(o: Object, idxs):
        match o:
            case Named(a, b):
                a2 = to if (idxs in chosen and a == frm) else a
                return Named(a2, go(b, idxs + (0,)))
            case ERepl(b, nn, on, ann, s):
                nn2 = to if (idxs in chosen and nn == frm) else nn
                return ERepl(go(b, idxs + (0,)), nn2, on, ann, go(s, idxs + (1,)))
            case _:
                from .syntax import children, with_children

                cs = children(o)
                if not cs:
                    return o
                return with_children(
                    o, tuple(go(ch, idxs + (i,)) for i, ch in enumerate(cs))
                )

    return go(o, ())


# ---------------------------------------------------------------------------
# Instances on whole objects


def axiom_instances(
    o: Object,
    include_ren: bool = False,
    require_canonical: bool = True,
    expansive: bool = True,
) -> list[tuple[Axiom, Object]]:
    """All single-axiom rewrites of a canonical object, at every position and
    in both orientations, whose results are again canonical.  Non-expansive
    enumeration omits the orientations that synthesize fresh structure
    (theta, lin and ren right-to-left); a bidirectional search recovers
    those steps from the other frontier."""
    if require_canonical and not is_canonical(o):
        raise NotCanonical(print_object(o))
    supply = supply_for(o)
    out = []
    for idxs, sub in positions(o):
        p = make_path(o, idxs)
        for name, orient, new_sub in _subtree_rewrites(sub, supply, include_ren,
                                                       expansive):
            res = rewrite_at(o, p, new_sub, supply)
            if require_canonical and not is_canonical(res):
                continue
            out.append((Axiom(name, orient, idxs, canonical_key(res)), res))
    return out


def apply_axiom(o: Object, ax: Axiom, include_ren: bool = True) -> Object:
    """Replay one axiom step; raises ValueError if no matching instance."""
    from .syntax import PathError

    try:
        sub = subobject_at(o, make_path(o, ax.path))
    except PathError as e:
        raise ValueError(str(e)) from None
    supply = supply_for(o)
    matches = []
    for name, orient, new_sub in _subtree_rewrites(sub, supply, include_ren):
        if name != ax.name or orient != ax.orientation:
            continue
        res = rewrite_at(o, make_path(o, ax.path), new_sub, supply)
        if ax.result_key is None or canonical_key(res) == ax.result_key:
            matches.append(res)
    if not matches:
        raise ValueError(f"no {ax.render()} instance here")
    return matches[0]


# ---------------------------------------------------------------------------
# Bounded decision procedure (bidirectional breadth-first search)


def equiv(
    o: Object,
    p: Object,
    max_states: int = 20000,
    max_depth: int = 12,
    include_ren: bool = False,
    expansive: bool = True,
) -> EquivOutcome:
    """Search for a chain of axiom applications joining o and p.

    Both inputs must be canonical.  The outcome is either Equivalent with a
    replayable certificate or NotWithinBounds, which is inconclusive."""
    for q in (o, p):
        if not is_canonical(q):
            raise NotCanonical(print_object(q))
    if sort_of(o) != sort_of(p):
        return EquivOutcome("not-within-bounds")
    ko, kp = canonical_key(o), canonical_key(p)
    if ko == kp:
        return EquivOutcome("equivalent", Certificate([]))

    # visited maps: key -> (object, steps from the origin)
    fwd = {ko: (o, [])}
    bwd = {kp: (p, [])}
    frontier_f = [ko]
    frontier_b = [kp]
    states = 2
    depth_f = depth_b = 0

    def splice(meet_key) -> Certificate:
        steps = list(fwd[meet_key][1])
        back = bwd[meet_key][1]
        # reverse the backward chain: each recorded step went from p towards
        # the meet, so the reverse direction flips its orientation
        for ax, prev_key in reversed(back):
            flipped = "RL" if ax.orientation == "LR" else "LR"
            steps.append(Axiom(ax.name, flipped, ax.path, prev_key))
        return Certificate(steps)

    while frontier_f or frontier_b:
        if depth_f + depth_b >= max_depth or states >= max_states:
            return EquivOutcome("not-within-bounds", states=states)
        # expand the smaller frontier
        expand_fwd = (len(frontier_f) <= len(frontier_b) and frontier_f) or not frontier_b
        frontier = frontier_f if expand_fwd else frontier_b
        visited = fwd if expand_fwd else bwd
        other = bwd if expand_fwd else fwd
        new_frontier = []
        for key in frontier:
            obj, steps = visited[key]
            for ax, res in axiom_instances(obj, include_ren, expansive=expansive):
                rk = canonical_key(res)
                if rk in visited:
                    continue
                if expand_fwd:
                    visited[rk] = (res, steps + [ax])
                else:
                    visited[rk] = (res, steps + [(ax, key)])
                states += 1
                new_frontier.append(rk)
                if rk in other:
                    return EquivOutcome("equivalent", splice(rk), states)
                if states >= max_states:
                    return EquivOutcome("not-within-bounds", states=states)
        if expand_fwd:
            frontier_f = new_frontier
            depth_f += 1
        else:
            frontier_b = new_frontier
            depth_b += 1
        if not frontier_f and not frontier_b:
            break
    return EquivOutcome("not-within-bounds", states=states)


def check_certificate(o: Object, cert: Certificate, p: Object) -> tuple[bool, str]:
    """Replay cert from o and compare the outcome with p; every intermediate
    must be canonical.  Returns (ok, diagnostic)."""
    cur = o
    if not is_canonical(cur):
        return False, "start object is not canonical"
    for i, ax in enumerate(cert.steps):
        try:
            cur = apply_axiom(cur, ax)
        except ValueError as e:
            return False, f"step {i + 1} ({ax.render()}): {e}"
        if not is_canonical(cur):
            return False, f"step {i + 1} ({ax.render()}): result not canonical"
    if alpha_eq(cur, p):
        return True, "ok"
    return False, f"replay ends at {print_object(cur)}, expected {print_object(p)}"


# ---------------------------------------------------------------------------
# Admissible equalities (random instances, closed by equiv)


def admissible_suite(seed: int, cases: int = 20, verbose: bool = False) -> dict:
    """Random well-scoped instances of the three admissible equations; each
    must close under equiv within default bounds."""
    import random

    from .gen_random import random_pure_command, random_pure_stack, random_pure_term

    rng = random.Random(seed)
    report = {"subs-swap": 0, "repl-swap": 0, "mu-swap": 0, "failures": []}

    def try_pair(kind, lhs, rhs):
        lhs, rhs = canon(lhs), canon(rhs)
        res = equiv(lhs, rhs, max_states=4000, max_depth=8)
        if res.equivalent:
            report[kind] += 1
        else:
            report["failures"].append((kind, print_object(lhs), print_object(rhs)))

    for _ in range(cases):
        t = random_pure_term(rng, 4)
        u = random_pure_term(rng, 3)
        v = random_pure_term(rng, 3)
        # (1) t[x\u][y\v] with x # v, y # u: use fresh distinct binders
        lhs = ESub(ESub(t, "xx1", u), "yy1", v)
        rhs = ESub(ESub(t, "yy1", v), "xx1", u)
        try_pair("subs-swap", lhs, rhs)

        c = random_pure_command(rng, 4)
        s = random_pure_stack(rng, 2)
        s2 = random_pure_stack(rng, 2)
        # (2) c[a/a'\s][b/b'\s'] with a != b', b != a', a' # s', b' # s
        lhs = ERepl(ERepl(c, "'na", "'pa", None, s), "'nb", "'pb", None, s2)
        rhs = ERepl(ERepl(c, "'nb", "'pb", None, s2), "'na", "'pa", None, s)
        try_pair("repl-swap", lhs, rhs)

        # (3) [a'] mu a. [b'] mu b. c
        lhs = Named("'qa", Mu("'ba", None, Named("'qb", Mu("'bb", None, c))))
        rhs = Named("'qb", Mu("'bb", None, Named("'qa", Mu("'ba", None, c))))
        try_pair("mu-swap", lhs, rhs)

    return report
