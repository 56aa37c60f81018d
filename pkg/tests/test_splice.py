import random

import pytest

from twistalex import splice as sp
from twistalex.laurent import degree_span, is_monic, parse_poly


@pytest.fixture(scope="module")
def diagrams(request):
    from conftest import FIXTURES
    return {n: sp.load_splice(FIXTURES / "splice" / f"{n}.splice")
            for n in ("k", "l_alpha", "l_beta", "l_gamma", "trefoil")}


TWO_VERTEX = "vertex a arrowhead\nvertex b boundary\nedge a b 1 1\n"
GRID = [(p, q) for p in range(-5, 6) for q in range(-5, 6)]


def test_parse_k(diagrams):
    d = diagrams["k"]
    assert len(d.vertices) == 8 and d.n == 1
    assert len(d.nodes()) == 3


def test_two_vertex_diagram():
    d = sp.parse_splice(TWO_VERTEX)
    assert len(d.vertices) == 2 and d.n == 1


def test_cycle_rejected():
    text = ("vertex a arrowhead\nvertex n1 node\nvertex n2 node\nvertex n3 node\n"
            "vertex b boundary\nvertex c boundary\n"
            "edge a n1 1 1\nedge n1 n2 1 1\nedge n2 n3 1 1\nedge n3 n1 1 1\nedge n2 b 1 1\n")
    with pytest.raises(sp.SpliceStructureError):
        sp.parse_splice(text)


def test_bad_degree_rejected():
    with pytest.raises(sp.SpliceStructureError):
        sp.parse_splice("vertex a arrowhead\nvertex n node\nvertex b boundary\nedge a n 1 1\nedge n b 1 1\n")


def test_parse_error_location():
    with pytest.raises(sp.SpliceParseError) as exc:
        sp.parse_splice("vertex a arrowhead\nvertex b bogus\n")
    assert exc.value.line == 2 and exc.value.column == 10
    with pytest.raises(sp.SpliceParseError) as exc:
        sp.parse_splice("vertex a arrowhead\nedge a zz 1 1\n")
    assert exc.value.line == 2 and exc.value.column == 8


def test_linking_numbers_k(diagrams):
    d = diagrams["k"]
    got = [sp.linking_number(d, "v1", f"v{i}") for i in range(2, 9)]
    assert got == [0, 0, 0, 0, 6, 3, 2]


def test_linking_symmetric_paths(diagrams):
    d = diagrams["l_alpha"]
    for a in d.components:
        for v in d.vertices:
            path = d.path(a, v)
            assert path[0] == a and path[-1] == v
            assert d.path(v, a) == path[::-1]


def test_linking_unknown_vertex(diagrams):
    with pytest.raises((KeyError, ValueError)):
        sp.linking_number(diagrams["k"], "v1", "nope")
    with pytest.raises(ValueError):
        sp.linking_number(diagrams["k"], "v3", "v1")


def test_alexander_k(diagrams):
    assert sp.en_alexander(diagrams["k"]) == parse_poly("t^2 - t + 1")


def test_alexander_l_alpha(diagrams):
    d = diagrams["l_alpha"]
    want = parse_poly("(t1^12-t1^6+1)(t1^4t2^4+t1^2t2^2+1)(t1^3t2^3+1)", d.variables())
    assert sp.en_alexander(d).associate(want)


def test_alexander_vanishing(diagrams):
    assert sp.en_alexander(diagrams["l_beta"]).is_zero()
    assert sp.en_alexander(diagrams["l_gamma"]).is_zero()


def test_denominator_zero_factor_is_error():
    # a boundary leaf with linking number 0 puts (t^0-1) in the denominator
    text = ("vertex a arrowhead\nvertex n node\nvertex b boundary\nvertex c boundary\n"
            "edge n a 1 1\nedge n b 0 1\nedge n c 0 1\n")
    with pytest.raises(sp.ENConventionError):
        sp.en_alexander(sp.parse_splice(text))


def test_alexander_independent_of_vertex_order(diagrams):
    from conftest import FIXTURES
    text = (FIXTURES / "splice" / "l_alpha.splice").read_text().splitlines()
    rng = random.Random(4)
    for _ in range(5):
        body = [ln for ln in text if ln.startswith(("vertex", "edge"))]
        rng.shuffle(body)
        verts = [ln for ln in body if ln.startswith("vertex")]
        edges = [ln for ln in body if ln.startswith("edge")]
        comps = [ln for ln in text if ln.startswith("components")]
        d = sp.parse_splice("\n".join(verts + edges + comps))
        assert sp.en_alexander(d) == sp.en_alexander(diagrams["l_alpha"])


def test_norms(diagrams):
    assert sp.thurston_norm(diagrams["k"], (1,)) == 1
    for p, q in GRID:
        assert sp.thurston_norm(diagrams["l_alpha"], (p, q)) == 7 * abs(p + q) + 12 * abs(p)
        assert sp.thurston_norm(diagrams["l_beta"], (p, q)) == abs(p + q)
        assert sp.thurston_norm(diagrams["l_gamma"], (p, q)) == 7 * abs(p) + abs(6 * p + q)
    assert sp.thurston_norm(diagrams["l_gamma"], (0, 1)) == 1


def test_norm_homogeneous(diagrams):
    for name in ("l_alpha", "l_beta", "l_gamma"):
        for p, q in [(1, 2), (-3, 1), (2, -5)]:
            for c in (-3, 0, 2, 5):
                d = diagrams[name]
                assert sp.thurston_norm(d, (c * p, c * q)) == abs(c) * sp.thurston_norm(d, (p, q))


def test_genus(diagrams):
    assert sp.knot_genus(diagrams["k"]) == 1
    assert sp.knot_genus(diagrams["trefoil"]) == 1
    assert sp.thurston_norm(diagrams["trefoil"], (1,)) == 1
    with pytest.raises(ValueError):
        sp.knot_genus(sp.parse_splice(TWO_VERTEX))
    with pytest.raises(ValueError):
        sp.knot_genus(diagrams["l_alpha"])


def test_fibered(diagrams):
    assert sp.en_is_fibered(diagrams["k"], (1,)) is False
    assert sp.en_is_fibered(diagrams["trefoil"], (1,)) is True
    assert not sp.en_is_fibered(diagrams["l_alpha"], (0, 1))
    assert not sp.en_is_fibered(diagrams["l_alpha"], (1, -1))
    for name in ("l_beta", "l_gamma"):
        for phi in sp.primitive_classes(2, 5):
            assert not sp.en_is_fibered(diagrams[name], phi)
    with pytest.raises(ValueError):
        sp.en_is_fibered(diagrams["k"], (0,))


def test_fibered_sign_invariant(diagrams):
    for name in ("l_alpha", "l_beta", "l_gamma"):
        for phi in sp.primitive_classes(2, 4):
            d = diagrams[name]
            assert sp.en_is_fibered(d, phi) == sp.en_is_fibered(d, tuple(-x for x in phi))


def test_specialize_l_alpha(diagrams):
    delta = sp.en_alexander(diagrams["l_alpha"])
    a = sp.specialize(delta, (1, -1))
    assert a.associate(parse_poly("6(t-1)(t^12-t^6+1)"))
    assert degree_span(a) == 13 and not is_monic(a)
    b = sp.specialize(delta, (0, 1))
    assert b.associate(parse_poly("(t^6-1)(t^2-t+1)"))
    assert b.associate(parse_poly("(t-1)(t^4+t^2+1)(t^3+1)"))
    assert degree_span(b) == 8 and is_monic(b)
    assert sp.specialize(sp.en_alexander(diagrams["l_beta"]), (2, 3)).is_zero()
    with pytest.raises(ValueError):
        sp.specialize(delta, (0, 0))


def test_mcmullen_examples(diagrams):
    k = sp.mcmullen_check(sp.en_alexander(diagrams["k"]), 1, 1, 1)
    assert k.inequality_holds and k.monic and k.equality and not k.obstructs_fibering
    d = diagrams["l_alpha"]
    delta = sp.en_alexander(d)
    r = sp.mcmullen_check(sp.specialize(delta, (1, -1)), sp.thurston_norm(d, (1, -1)), 2, 1)
    assert r.degree == sp.thurston_norm(d, (1, -1)) + 1
    assert not r.monic and r.obstructs_fibering
    r = sp.mcmullen_check(sp.specialize(delta, (0, 1)), sp.thurston_norm(d, (0, 1)), 2, 1)
    assert r.degree == 8 and r.monic and r.equality and not r.obstructs_fibering


def test_mcmullen_grid(diagrams):
    d = diagrams["l_alpha"]
    delta = sp.en_alexander(d)
    for phi in sp.primitive_classes(2, 5):
        f = sp.specialize(delta, phi)
        assert degree_span(f) <= sp.thurston_norm(d, phi) + 1
