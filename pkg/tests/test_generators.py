import random

from lmtool.equivalence import equiv
from lmtool.generators import gen_equiv_pair, gen_typed
from lmtool.reduction import is_canonical
from lmtool.syntax import alpha_eq, print_object
from lmtool.typing import check_object, relevance_check


def test_gen_typed_deterministic():
    a = gen_typed(424242, size=14)
    b = gen_typed(424242, size=14)
    assert a[0] == b[0] and a[1] == b[1] and a[2] == b[2]


def test_gen_typed_size_one_is_a_leaf():
    o, g, d = gen_typed(1, size=1)
    assert print_object(o).count(" ") <= 2


def test_gen_typed_all_check():
    rng = random.Random(77)
    for _ in range(150):
        o, g, d = gen_typed(rng.randrange(10**9), size=20)
        der = check_object(o, g, d)
        assert relevance_check(der)


def test_gen_equiv_pair_canonical_and_related_at_depth_one():
    rng = random.Random(88)
    for k in range(60):
        ax = ["exs", "exr", "lin", "pp", "rho", "theta"][k % 6]
        o, p, axiom = gen_equiv_pair(seed=rng.randrange(10**9), axiom=ax)
        assert axiom.name == ax
        assert is_canonical(o) and is_canonical(p)
        res = equiv(o, p, max_states=4000, max_depth=1)
        assert res.equivalent and len(res.certificate.steps) <= 1


def test_gen_equiv_pair_free_axiom_choice():
    found = set()
    rng = random.Random(99)
    for _ in range(40):
        o, p, axiom = gen_equiv_pair(seed=rng.randrange(10**9))
        found.add(axiom.name)
        assert is_canonical(o) and is_canonical(p)
        assert not alpha_eq(o, p) or axiom.name  # rewrites may alpha-coincide
    assert len(found) >= 3


def test_gen_equiv_pair_deterministic():
    a = gen_equiv_pair(seed=5, axiom="lin")
    b = gen_equiv_pair(seed=5, axiom="lin")
    assert alpha_eq(a[0], b[0]) and alpha_eq(a[1], b[1])
