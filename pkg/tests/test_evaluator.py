import pytest
from hypothesis import given, settings, strategies as st

from datr.evaluator import (
    NO_PREFIX, STRICT, UNKNOWN_NODE, Context, EvalConfig, LimitExceeded, Undefined, Value,
    eval_descriptor, eval_local, eval_sequence, evaluate_query, format_outcome,
)
from datr.model import (
    Atom, AtomSym, DefSentence, GlobalNodePath, GlobalPath, LocalNodePath, NodeSym, path,
)
from datr.oracle import oracle_evaluate, random_theory
from datr.parser import parse_theory

N = NodeSym
A = lambda s: Atom(AtomSym(s))  # noqa: E731


def value(text):
    return Value(path(text))


def query(theory, node, p, **cfg):
    return evaluate_query(theory, N(node), path(p), EvalConfig(**cfg))[0]


@pytest.mark.parametrize("node, p, expected", [
    ("Walk", "syn cat", "verb"),
    ("Walk", "mor pres", "walk"),
    ("Walk", "mor past", "walk ed"),
    ("Walk", "mor root root", "walk"),
    ("Aux", "syn type", "aux"),
    ("Verb", "syn type", "main"),
    ("Can", "mor past", "could"),
    ("Mow", "syn cat", "verb"),
    ("Can", "syn cat", "verb"),
    ("Can", "syn type", "aux"),
    # hand traces: Verb <mor pres part> == "<mor root>" ing at global Walk
    ("Walk", "mor pres part", "walk ing"),
    ("Walk", "mor pres sing three", "walk s"),
    # Mow -> EnVerb <mor past part> == "<mor root>" en, global node stays Mow
    ("Mow", "mor past part", "mow en"),
    # Can -> Modal <mor pres sing three> == "<mor root>", no suffix atom
    ("Can", "mor pres sing three", "can"),
    ("Mow", "mor past", "mow ed"),
])
def test_figure_queries(verbs, node, p, expected):
    assert query(verbs, node, p) == value(expected)


def test_evaluable_path_undefined(verbs):
    # <mor form> needs <syn form>, which no node on the Walk -> Verb chain defines
    assert query(verbs, "Walk", "mor form") == Undefined(NO_PREFIX, N("Verb"), path("syn form"))


def test_unknown_node():
    t, _ = parse_theory("A: <> == B .")
    assert query(t, "A", "x") == Undefined(UNKNOWN_NODE, N("B"), path("x"))
    assert query(t, "Zed", "") == Undefined(UNKNOWN_NODE, N("Zed"), ())


def test_strict_mode(verbs):
    assert query(verbs, "Walk", "mor root root", mode=STRICT) == Undefined(
        NO_PREFIX, N("Walk"), path("mor root root"))
    assert query(verbs, "Walk", "mor root", mode=STRICT) == value("walk")
    # Walk:<mor past> only resolves through the default at <>
    assert isinstance(query(verbs, "Walk", "mor past", mode=STRICT), Undefined)
    assert query(verbs, "Can", "mor past", mode=STRICT) == value("could")


def test_eval_local_default_and_override(verbs):
    c = Context(N("Walk"), path("mor root root"))
    assert eval_local(verbs, c, N("Walk"), path("mor root root")) == value("walk")
    c = Context(N("Aux"), path("syn type"))
    assert eval_local(verbs, c, N("Aux"), path("syn type")) == value("aux")


def test_global_path_switches_context(verbs):
    d = GlobalPath((A("mor"), A("root")))
    c = Context(N("Walk"), path("mor pres"))
    outcome, events = evaluate_query(verbs, N("Walk"), path("mor pres"),
                                     EvalConfig(trace_enabled=True))
    assert eval_descriptor(verbs, c, d) == value("walk")
    switches = [e for e in events if e.kind == "context-switch"]
    assert [e.global_ctx for e in switches] == [Context(N("Walk"), path("mor root"))]


def test_atom_ignores_extension(verbs):
    c = Context(N("Walk"), ())
    assert eval_descriptor(verbs, c, A("ed"), path("sing")) == value("ed")


NESTED = "X: <syn form> == passive .\n<mor passive> == ok .\n"


def test_nested_evaluable_path():
    # "<syn form>" in context X/<mor form> -> passive; then "<mor passive>" -> ok
    t, _ = parse_theory(NESTED)
    d = GlobalPath((A("mor"), GlobalPath((A("syn"), A("form")))))
    assert eval_descriptor(t, Context(N("X"), path("mor form")), d) == value("ok")
    t2, _ = parse_theory(NESTED + 'X: <mor form> == "<mor "<syn form>">" .')
    assert oracle_evaluate(t2, N("X"), path("mor form")) == value("ok")


def test_eval_sequence(verbs):
    phi = (GlobalPath((A("mor"), A("root"))), A("ed"))
    assert eval_sequence(verbs, Context(N("Walk"), path("mor past")), phi) == value("walk ed")
    assert eval_sequence(verbs, Context(N("Walk"), ()), ()) == Value(())
    phi = (GlobalPath((A("mor"), A("root"))), A("ing"))
    assert eval_sequence(verbs, Context(N("Walk"), path("mor pres part")), phi) == value("walk ing")


def test_undefined_short_circuits(verbs):
    phi = (LocalNodePath(N("Nowhere"), ()), A("ed"))
    out = eval_sequence(verbs, Context(N("Walk"), ()), phi)
    assert out == Undefined(UNKNOWN_NODE, N("Nowhere"), ())


def test_local_inheritance_keeps_global_context():
    # B's quoted lookup moves the context to C only inside B's evaluation;
    # the sibling "<p>" still resolves against Q.
    t, _ = parse_theory(
        'Q: <> == B:<> "<p>" .\n<p> == two .\n'
        'B: <> == "C:<q>" .\n'
        'C: <q> == one .\n<p> == wrong .\n')
    assert query(t, "Q", "") == value("one two")


def test_global_node_reuses_global_path():
    t, _ = parse_theory('A: <x> == "B" .\nB: <x> == bx .\n<x y> == bxy .\n')
    # extension <y> is not appended to "B"; the global path already holds it
    assert query(t, "A", "x y") == value("bxy")
    assert query(t, "A", "x") == value("bx")


def test_extension_appended_after_subterms():
    t, _ = parse_theory('A: <> == B:<p "<k>"> .\n<k> == q .\nB: <p q r> == hit .\n<p> == miss .\n')
    assert query(t, "A", "r") == value("hit")


def test_empty_value():
    t, _ = parse_theory("A: <> == .")
    assert query(t, "A", "a b") == Value(())
    assert format_outcome(Value(())) == "()"


def test_cycle_hits_limit():
    t, _ = parse_theory("L: <> == L:<> .")
    out = query(t, "L", "", max_steps=50)
    assert out == LimitExceeded(51)
    assert format_outcome(out) == "LIMIT EXCEEDED (51 steps)"


def test_growing_path_hits_limit():
    t, _ = parse_theory('G: <> == "<a>" .')
    assert isinstance(query(t, "G", "", max_steps=200), LimitExceeded)


def test_config_validation():
    with pytest.raises(ValueError):
        EvalConfig(max_steps=0)
    with pytest.raises(ValueError):
        EvalConfig(mode="lazy")


def test_trace_format(verbs):
    _, events = evaluate_query(verbs, N("Walk"), path("mor past"), EvalConfig(trace_enabled=True))
    assert events[0].format() == "1\tlookup\tglobal=Walk:<mor past>\tlocal=Walk:<mor past>\t<>"
    assert events[1].format() == "2\tdescriptor\tglobal=Walk:<mor past>\tlocal=Walk:<mor past>\tVerb:<>"
    assert [e.step for e in events] == list(range(1, len(events) + 1))


def test_no_trace_by_default(verbs):
    assert evaluate_query(verbs, N("Walk"), path("mor past"))[1] == []


# -- properties over generated theories ---------------------------------------

seeds = st.integers(min_value=1, max_value=10_000)
short_paths = st.lists(st.sampled_from(["a", "b", "c", "x"]), max_size=3).map(
    lambda xs: tuple(AtomSym(a) for a in xs))
CFG = EvalConfig(max_steps=500)


@settings(max_examples=150, deadline=None)
@given(seeds, short_paths, st.data())
def test_strict_values_survive_defaults(seed, p, data):
    t = random_theory(seed, 4, 3, use_globals=True)
    n = data.draw(st.sampled_from(t.node_order))
    strict, _ = evaluate_query(t, n, p, EvalConfig(mode=STRICT, max_steps=500))
    if isinstance(strict, Value):
        assert evaluate_query(t, n, p, CFG)[0] == strict


@settings(max_examples=100, deadline=None)
@given(seeds, short_paths, st.data())
def test_deterministic(seed, p, data):
    t = random_theory(seed, 4, 3, use_globals=True)
    n = data.draw(st.sampled_from(t.node_order))
    cfg = EvalConfig(max_steps=500, trace_enabled=True)
    assert evaluate_query(t, n, p, cfg) == evaluate_query(t, n, p, cfg)


@settings(max_examples=100, deadline=None)
@given(seeds, short_paths, st.data(), st.integers(min_value=1, max_value=300))
def test_step_budget_respected(seed, p, data, budget):
    t = random_theory(seed, 5, 3, use_globals=True)
    n = data.draw(st.sampled_from(t.node_order))
    out, events = evaluate_query(t, n, p, EvalConfig(max_steps=budget, trace_enabled=True))
    described = sum(e.kind == "descriptor" for e in events)
    assert described <= budget
    if isinstance(out, LimitExceeded):
        assert out.steps == budget + 1


@settings(max_examples=100, deadline=None)
@given(seeds, short_paths, st.data())
def test_context_switch_sets_lookup_context(seed, p, data):
    t = random_theory(seed, 4, 3, use_globals=True)
    n = data.draw(st.sampled_from(t.node_order))
    _, events = evaluate_query(t, n, p, EvalConfig(max_steps=300, trace_enabled=True))
    for ev, nxt in zip(events, events[1:]):
        if ev.kind == "context-switch":
            assert nxt.kind == "lookup"
            assert nxt.global_ctx == ev.global_ctx
            assert (nxt.local_node, nxt.local_path) == (ev.global_ctx.global_node,
                                                       ev.global_ctx.global_path)


@settings(max_examples=100, deadline=None)
@given(seeds, short_paths, short_paths, st.data())
def test_atoms_are_constant(seed, ext, gp, data):
    t = random_theory(seed, 3, 2, use_globals=True)
    n = data.draw(st.sampled_from(t.node_order))
    assert eval_descriptor(t, Context(n, gp), A("z"), ext) == value("z")


@settings(max_examples=150, deadline=None)
@given(seeds, st.data())
def test_new_sentence_only_shadows_its_extensions(seed, data):
    t = random_theory(seed, 4, 3, use_globals=False)
    target = data.draw(st.sampled_from(t.node_order))
    # a node nobody refers to, so only its own lookups can change
    fresh = N("Fresh")
    base = t.add(DefSentence(fresh, (), (LocalNodePath(target, ()),)))
    key = data.draw(short_paths.filter(bool))
    changed = base.add(DefSentence(fresh, key, (A("new"),)))
    q = data.draw(short_paths)
    before = evaluate_query(base, fresh, q, CFG)[0]
    after = evaluate_query(changed, fresh, q, CFG)[0]
    if q[:len(key)] == key:
        assert after == value("new")
    elif not isinstance(before, LimitExceeded):
        assert after == before
