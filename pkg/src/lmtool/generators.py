"""Deterministic random generators: well-typed objects built rule by rule,
and canonical one-axiom pairs for the bisimulation driver."""

from __future__ import annotations

import random
from typing import Optional

from .equivalence import Axiom, axiom_instances
from .gen_random import random_object
from .reduction import canon, is_canonical
from .syntax import (
    Abs,
    App,
    Arrow,
    Base,
    ERepl,
    ESub,
    Mu,
    Named,
    Object,
    Push,
    Type,
    Var,
    empty_stack,
    sort_of,
)
from .typing_util import fold_stack_type

# ---------------------------------------------------------------------------
# Typed generation


class _TypedGen:
    def __init__(self, rng: random.Random, base_types: tuple[str, ...]):
        self.rng = rng
        self.bases = [Base(b) for b in base_types]
        self.counter = 0
        self.gamma: dict[str, Type] = {}
        self.delta: dict[str, Type] = {}

    def fresh(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    def random_type(self, depth: int = 2) -> Type:
        if depth <= 0 or self.rng.random() < 0.55:
            return self.rng.choice(self.bases)
        return Arrow(self.random_type(depth - 1), self.random_type(depth - 1))

    # --- terms ---------------------------------------------------------

    def term(self, a: Type, fuel: int, sg: dict[str, Type], sd: dict[str, Type]) -> Object:
        rng = self.rng
        if fuel <= 1:
            return self.leaf(a, sg)
        choices = ["app", "mu", "var"]
        if isinstance(a, Arrow):
            choices += ["abs", "abs"]
        choices += ["sub"]
        match rng.choice(choices):
            case "var":
                return self.leaf(a, sg)
            case "abs":
                x = self.fresh("x")
                body = self.term(a.right, fuel - 1, {**sg, x: a.left}, sd)
                return Abs(x, a.left, body)
            case "mu":
                n = self.fresh("'m")
                body = self.command(fuel - 1, sg, {**sd, n: a})
                return Mu(n, a, body)
            case "app":
                c = self.random_type(1)
                k = rng.randint(1, fuel - 1)
                f = self.term(Arrow(c, a), k, sg, sd)
                u = self.term(c, fuel - k, sg, sd)
                return App(f, u)
            case "sub":
                c = self.random_type(1)
                x = self.fresh("x")
                k = rng.randint(1, fuel - 1)
                body = self.term(a, k, {**sg, x: c}, sd)
                u = self.term(c, fuel - k, sg, sd)
                return ESub(body, x, u)
        raise AssertionError

    def leaf(self, a: Type, sg: dict[str, Type]) -> Object:
        rng = self.rng
        cands = [x for x, t in sg.items() if t == a]
        cands += [x for x, t in self.gamma.items() if t == a]
        if cands and rng.random() < 0.7:
            return Var(rng.choice(cands))
        x = self.fresh("z")
        self.gamma[x] = a
        return Var(x)

    # --- commands ------------------------------------------------------

    def pick_name(self, a: Type, sd: dict[str, Type]) -> str:
        rng = self.rng
        cands = [n for n, t in sd.items() if t == a]
        cands += [n for n, t in self.delta.items() if t == a]
        if cands and rng.random() < 0.7:
            return rng.choice(cands)
        n = self.fresh("'f")
        self.delta[n] = a
        return n

    def command(self, fuel: int, sg: dict[str, Type], sd: dict[str, Type]) -> Object:
        rng = self.rng
        if fuel > 3 and rng.random() < 0.35:
            # explicit replacement
            b = self.random_type(1)
            arity = rng.randint(0, 2)
            stypes = tuple(self.random_type(1) for _ in range(arity))
            ann = fold_stack_type(stypes, b)
            on = self.fresh("'r")
            nn = self.pick_name(b, sd)
            k = rng.randint(1, fuel - 1)
            body = self.command(k, sg, {**sd, on: ann, nn: b})
            stack: Object = empty_stack()
            left = fuel - k
            for st in reversed(stypes):
                kk = max(1, left // max(1, arity))
                stack = Push(self.term(st, kk, sg, sd), stack)
            return ERepl(body, nn, on, ann, stack)
        a = self.random_type(1)
        n = self.pick_name(a, sd)
        return Named(n, self.term(sd.get(n, self.delta.get(n, a)), max(1, fuel - 1), sg, sd))


def gen_typed(
    seed: int, size: int = 20, base_types: tuple[str, ...] = ("A", "B")
) -> tuple[Object, dict[str, Type], dict[str, Type]]:
    """A well-typed annotated object with the environments for its free
    variables and names; deterministic per seed."""
    rng = random.Random(seed)
    g = _TypedGen(rng, base_types)
    if rng.random() < 0.7:
        o = g.term(g.random_type(2), max(1, size), {}, {})
    else:
        o = g.command(max(1, size), {}, {})
    return o, dict(g.gamma), dict(g.delta)


# ---------------------------------------------------------------------------
# Canonical one-axiom pairs


def _canonical_piece(rng: random.Random, size: int, sort: str) -> Object:
    while True:
        o = canon(random_object(rng, size))
        if sort_of(o) == sort:
            return o


def _template(rng: random.Random, axiom: str, include_ren: bool) -> Object:
    i = rng.randrange(10**6)
    v = _canonical_piece(rng, 6, "term")
    u = _canonical_piece(rng, 5, "term")
    cc = _canonical_piece(rng, 6, "command")
    tt = _canonical_piece(rng, 3, "term")
    match axiom:
        case "exs":
            # ([q](v zz))-style linear wrap with the substitution outside
            x = f"gx{i}"
            body = rng.choice(
                [
                    Abs(f"gy{i}", None, App(Var(x), v)),
                    Mu(f"'gm{i}", None, Named(f"'gf{i}", App(Var(x), v))),
                    App(App(Var(x), v), tt),
                ]
            )
            return ESub(body, x, u)
        case "exr":
            on, nn = f"'go{i}", f"'gn{i}"
            inner = Named(on, tt)
            lcc = rng.choice(
                [
                    Named(f"'gf{i}", Mu(f"'gm{i}", None, inner)),
                    ERepl(inner, f"'ge{i}", f"'gq{i}", None, empty_stack()),
                ]
            )
            stack = rng.choice([empty_stack(), Push(u, empty_stack())])
            return ERepl(lcc, nn, on, None, stack)
        case "lin":
            from .equivalence import _stack_inert

            on, nn = f"'go{i}", f"'gn{i}"
            while not _stack_inert(tt):
                tt = _canonical_piece(rng, 2, "term")
            return ERepl(Named(on, tt), nn, on, None, Push(u, empty_stack()))
        case "pp":
            return Named(
                f"'pa{i}",
                Abs(
                    f"px{i}",
                    None,
                    Mu(
                        f"'pb{i}",
                        None,
                        Named(
                            f"'pc{i}",
                            Abs(f"py{i}", None, Mu(f"'pd{i}", None, cc)),
                        ),
                    ),
                ),
            )
        case "rho":
            return Named(f"'ga{i}", Mu(f"'gb{i}", None, cc))
        case "theta":
            a = f"'gt{i}"
            return Mu(a, None, Named(a, tt))
        case "ren":
            on, nn = f"'go{i}", f"'gn{i}"
            return ERepl(cc, nn, on, None, empty_stack())
    raise ValueError(axiom)


def gen_equiv_pair(
    seed: int,
    size: int = 8,
    axiom: Optional[str] = None,
    include_ren: bool = False,
) -> tuple[Object, Object, Axiom]:
    """A canonical object, a one-axiom rewrite of it, and the axiom used.
    Retries internally until an instance of the requested axiom exists."""
    rng = random.Random(seed)
    for _ in range(200):
        if axiom is None:
            o = canon(random_object(rng, size))
        else:
            o = _template(rng, axiom, include_ren)
            if not is_canonical(o):
                continue
        insts = axiom_instances(o, include_ren=include_ren or axiom == "ren")
        if axiom is not None:
            insts = [(ax, r) for ax, r in insts if ax.name == axiom]
            # prefer root instances: those are the templated ones
            roots = [(ax, r) for ax, r in insts if ax.path == ()]
            insts = roots or insts
        if not insts:
            continue
        ax, r = insts[rng.randrange(len(insts))]
        return o, r, ax
    raise RuntimeError(f"could not build an instance of {axiom}")
