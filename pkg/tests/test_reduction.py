import random

import pytest

from lmtool.gen_random import random_object, random_pure_term
from lmtool.lmu import is_pure, project
from lmtool.reduction import (
    BudgetExhausted,
    NotCanonicalError,
    RuleTag,
    canon,
    classify_R,
    is_canonical,
    is_linear_path,
    linear_sort_pair,
    lm_redexes,
    lm_step,
    meaningful_redexes,
    meaningful_step,
    reduce_to_nf,
    reduction_graph,
)
from lmtool.syntax import (
    alpha_eq,
    is_barendregt,
    make_path,
    parse,
    print_object,
)


def t(text):
    return parse(text, freshen=False)


def c(text):
    return parse(text, sort="command", freshen=False)


def path_of(o, tag):
    rs = [p for tg, p in lm_redexes(o) if tg == tag]
    assert len(rs) == 1, f"expected a unique {tag} redex"
    return rs[0]


# --- redex search ------------------------------------------------------------


def test_b_redex_at_a_distance():
    o = t(r"((\x. q)[y\v]) u")
    rs = lm_redexes(o)
    assert [tag for tag, _ in rs if tag == RuleTag.B] == [RuleTag.B]
    # the substitution frame itself is an S redex
    assert RuleTag.S in [tag for tag, _ in rs]


def test_m_redex():
    o = t("(mu 'a. ['a]x) y")
    assert [tag for tag, _ in lm_redexes(o)] == [RuleTag.M]


def test_no_redexes():
    assert lm_redexes(t("x y")) == []


# --- stepping ----------------------------------------------------------------


def test_m_step_shape():
    o = t("(mu 'a. ['a]x) y")
    o2 = lm_step(o, RuleTag.M, path_of(o, RuleTag.M))
    assert alpha_eq(o2, t("mu 'b. (['a]x)['b/'a\\y . #]"))
    assert is_barendregt(o2)


def test_s_step():
    o = t(r"q[x\u]")
    assert alpha_eq(lm_step(o, RuleTag.S, path_of(o, RuleTag.S)), t("q"))


def test_r_step_on_named():
    o = c("(['a]x)['b/'a\\y . #]")
    p = path_of(o, RuleTag.R)
    assert alpha_eq(lm_step(o, RuleTag.R, p), c("['b]x y"))


def test_b_step_keeps_frames_outside():
    o = t(r"((\x. x)[y\v]) u")
    o2 = lm_step(o, RuleTag.B, path_of(o, RuleTag.B))
    assert alpha_eq(o2, t(r"(x[x\u])[y\v]"))


# --- classification ----------------------------------------------------------


@pytest.mark.parametrize(
    "text,expected",
    [
        ("(['a]x)['b/'a\\y . #]", RuleTag.N_LIN),
        ("(['g](x (mu 'd. ['a]y)))['b/'a\\z . #]", RuleTag.N_NONLIN),
        ("((['g]x)['a/'g\\#])['b/'a\\z . #]", RuleTag.W),
        ("((['g]x)['a/'g\\w . #])['b/'a\\z . #]", RuleTag.C),
        ("(['a]x)['b/'a\\#]", RuleTag.R_EMPTY),
        ("(['a](mu 'd. ['a]y))['b/'a\\z . #]", RuleTag.R_NEQ1),
        ("(['g]x)['b/'a\\z . #]", RuleTag.R_NEQ1),
    ],
)
def test_classify(text, expected):
    o = c(text)
    assert classify_R(o, make_path(o, ())) == expected


def test_classify_nonlinear_swap_and_composition():
    # inner renaming in argument position: non-linear swap
    o = c("(['g]x (mu 'd. (['q]w)['a/'q\\#]))['b/'a\\v . #]")
    assert classify_R(o, make_path(o, ())) == RuleTag.W_NONLIN
    # inner stack replacement in argument position: non-linear composition
    o2 = c("(['g]x (mu 'd. (['q]w)['a/'q\\u . #]))['b/'a\\v . #]")
    assert classify_R(o2, make_path(o2, ())) == RuleTag.C_NONLIN


def test_classify_partition_random():
    rng = random.Random(5)
    tags = set()
    for _ in range(400):
        o = random_object(rng, 8)
        for tg, p in lm_redexes(o):
            if tg is RuleTag.R:
                tags.add(classify_R(o, p))
    # every classification is one of the refined tags
    allowed = {
        RuleTag.R_EMPTY,
        RuleTag.R_NEQ1,
        RuleTag.N_LIN,
        RuleTag.N_NONLIN,
        RuleTag.W,
        RuleTag.W_NONLIN,
        RuleTag.C,
        RuleTag.C_NONLIN,
    }
    assert tags <= allowed and len(tags) >= 4


# --- linear contexts ---------------------------------------------------------


def test_linear_paths():
    o = c("['a]x y")  # [a](x y): function position is linear
    root = make_path(o, ())
    assert is_linear_path(o, root, make_path(o, (0, 0)))
    assert not is_linear_path(o, root, make_path(o, (0, 1)))
    assert linear_sort_pair(o, root, make_path(o, (0, 0))) == "CT"


def test_linear_path_examples():
    # ([b](box v))['a2/'a\u.#] seen from the replacement body down to the
    # function position: command to term, linear
    o = c("(['b]x v)['a2/'a\\u . #]")
    assert is_linear_path(o, make_path(o, ()), make_path(o, (0, 0, 0)))
    # entering the stack of a replacement is never linear
    assert not is_linear_path(o, make_path(o, ()), make_path(o, (1, 0)))


# --- canonical forms ---------------------------------------------------------


def test_canon_bmc_example():
    o = t("(mu 'a. ['a]x) y z")
    got = canon(o)
    assert alpha_eq(got, t("mu 'b. (['a]x)['b/'a\\y . z . #]"))


def test_canon_identity_on_normal():
    o = t("x")
    assert canon(o) == o


def test_canon_w_example():
    o = c("((['g]x)['a/'g\\#])['b/'a\\z . #]")
    got = canon(o)
    expected = c("((['g]x)['a/'g\\z . #])['b/'a\\#]")
    assert alpha_eq(got, expected)
    # and projection is unchanged
    assert alpha_eq(project(got), project(o))


def test_canon_idempotent_random():
    rng = random.Random(99)
    for _ in range(200):
        o = random_object(rng, 8)
        co = canon(o)
        assert is_canonical(co)
        assert alpha_eq(canon(co), co)


def test_canon_projection_is_a_reduct():
    # canonicalization projects to a (possibly empty) lambda-mu reduction:
    # C and W steps preserve the projection exactly, B and M steps project
    # to beta/mu steps
    rng = random.Random(98)
    for _ in range(150):
        o = random_object(rng, 8)
        co = canon(o)
        try:
            nf1, _ = reduce_to_nf(project(o), budget=500)
            nf2, _ = reduce_to_nf(project(co), budget=500)
        except BudgetExhausted:
            continue
        assert alpha_eq(nf1, nf2)


def test_canon_projection_exact_without_bm():
    # when the object has no B or M redex, canon only reorganizes explicit
    # replacements and the projection is untouched
    rng = random.Random(97)
    checked = 0
    for _ in range(400):
        o = random_object(rng, 8)
        if any(tag in (RuleTag.B, RuleTag.M) for tag, _ in lm_redexes(o)):
            continue
        co = canon(o)
        assert alpha_eq(project(co), project(o))
        checked += 1
    assert checked > 100


# --- meaningful reduction ----------------------------------------------------


def test_meaningful_rejects_non_canonical():
    with pytest.raises(NotCanonicalError):
        meaningful_redexes(t(r"(\x. x) y"))


def test_meaningful_redexes_linear_named_is_equational():
    o = c("(['a]x)['b/'a\\y . #]")
    assert meaningful_redexes(o) == []


def test_meaningful_redexes_counts():
    o = c("(['a](x (mu 'b. ['a]y)))['a2/'a\\z . #]")
    rs = meaningful_redexes(o)
    assert [tag for tag, _ in rs] == [RuleTag.R_NEQ1]


def test_meaningful_step_replacement_example():
    o = c("(['a](x (mu 'b. ['a]y)))['a2/'a\\(\\z. z) . #]")
    rs = meaningful_redexes(o)
    assert len(rs) == 1
    got = meaningful_step(o, *rs[0])
    expected = c("['a2](x (mu 'b. ['a2]y (\\z. z))) (\\z. z)")
    assert alpha_eq(got, expected)


def test_meaningful_step_nonlinear_named():
    o = c("(['b](x (mu 'g. ['a]y)))['a2/'a\\z . #]")
    rs = meaningful_redexes(o)
    assert [tag for tag, _ in rs] == [RuleTag.N_NONLIN]
    got = meaningful_step(o, *rs[0])
    assert alpha_eq(got, c("['b]x (mu 'g. ['a2]y z)"))


def test_meaningful_step_s_vacuous():
    o = t(r"y[x\u]")
    rs = meaningful_redexes(o)
    assert [tag for tag, _ in rs] == [RuleTag.S]
    assert alpha_eq(meaningful_step(o, *rs[0]), t("y"))


# --- reduction driver --------------------------------------------------------


def test_reduce_identity():
    o = t(r"(\x. x) y")
    nf, trace = reduce_to_nf(o, budget=10)
    assert alpha_eq(nf, t("y"))
    assert [tag for tag, _, _ in trace.steps] == [RuleTag.B, RuleTag.S]


def test_reduce_omega_exhausts():
    omega = t(r"(\x. x x) (\x. x x)")
    with pytest.raises(BudgetExhausted):
        reduce_to_nf(omega, budget=120)


def test_reduce_callcc_applied():
    callcc = r"\x. mu 'a. ['a]x (\y. mu 'd. ['a]y)"
    o = t(rf"({callcc}) (\k. z)")
    nf, _ = reduce_to_nf(o, budget=200)
    assert is_pure(nf)
    assert alpha_eq(nf, t("mu 'a. ['a]z"))
    # the whole reduction graph reaches the same normal form
    _, nfs = reduction_graph(o, max_states=500)
    assert nfs and all(alpha_eq(nfs[0], other) for other in nfs)


def test_refined_mode_leaves_renamings():
    o = c("['a]mu 'b. ['b]x")
    # plain mode executes everything
    nf, _ = reduce_to_nf(c("(['b]x)['a/'b\\#]"), budget=50, mode="plain")
    assert alpha_eq(nf, c("['a]x"))
    nf2, _ = reduce_to_nf(c("(['b]x)['a/'b\\#]"), budget=50, mode="refined")
    assert alpha_eq(nf2, c("(['b]x)['a/'b\\#]"))


def test_projection_simulation_random():
    rng = random.Random(31)
    for _ in range(120):
        o = random_object(rng, 7)
        for tag, p in lm_redexes(o)[:3]:
            o2 = lm_step(o, tag, p)
            # projections are pure and the step projects to lambda-mu steps
            assert is_pure(project(o2))
            pr, _ = reduce_to_nf(project(o), budget=400)
            pr2, _ = reduce_to_nf(project(o2), budget=400)
            assert alpha_eq(pr, pr2)


def test_local_confluence_random_graphs():
    rng = random.Random(77)
    done = 0
    for _ in range(100):
        o = random_pure_term(rng, 6)
        try:
            _, nfs = reduction_graph(o, max_states=400)
        except BudgetExhausted:
            continue
        keys = {print_object(canonish) for canonish in nfs}
        if nfs:
            first = nfs[0]
            assert all(alpha_eq(first, other) for other in nfs[1:]), keys
            done += 1
    assert done > 50
