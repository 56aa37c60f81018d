import random
from itertools import combinations

import pytest

from conftest import FIXTURES
from twistalex import presentation as pres
from twistalex import splice as sp
from twistalex import twisted as tw
from twistalex.laurent import LaurentPoly, ZeroPolynomialError, gcd_univariate, parse_poly
from twistalex.perms import PermRep, load_rep, trivial_rep
from twistalex.snf import smith_normal_form


def grp(name):
    return pres.load_presentation(FIXTURES / "groups" / f"{name}.grp")


def rep(name):
    return load_rep(FIXTURES / "reps" / f"{name}.rep")


def F(text, p):
    return parse_poly(text, ("t",), p)


def char_of(g, cls):
    return pres.class_as_char(pres.abelianize(g), cls)


TREFOIL_CHAR = {"x": 1, "y": 1}


def test_perm_matrix_reexport():
    assert tw.perm_matrix((1, 2, 3)) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_alexander_matrix_trefoil():
    t = grp("trefoil")
    M = tw.alexander_matrix(t, tw.TensorRep(trivial_rep(), TREFOIL_CHAR, 7))
    assert len(M) == 1 and len(M[0]) == 2
    assert M[0][1].associate(F("t^2 - t + 1", 7))
    assert M[0][0].associate(F("t^2 - t + 1", 7))


def test_alexander_matrix_shape_k():
    k = grp("pi1_k")
    M = tw.alexander_matrix(k, tw.TensorRep(rep("alpha_k"), char_of(k, (1,)), 5))
    assert len(M) == 30 and len(M[0]) == 25


def test_sparse_matrix_matches_fox_reference():
    for name, r, cls, p in [("pi1_k", "alpha_k", (1,), 5), ("pi1_l_beta", None, (0, 1), 13)]:
        g = grp(name)
        phi = tw.TensorRep(rep(r) if r else trivial_rep(), char_of(g, cls), p)
        assert tw.alexander_matrix(g, phi) == tw.alexander_matrix_via_fox(g, phi)


def test_trivial_rep_zero_character_commutators():
    g = grp("necklace")
    M = tw.alexander_matrix(g, tw.TensorRep(trivial_rep(2), {"n": 0, "s": 0, "t": 0}, 5))
    assert all(e.is_zero() for row in M for e in row)


def test_k_vanishes_small_primes():
    k = grp("pi1_k")
    ch = char_of(k, (1,))
    assert ch == {"x": 0, "y": 0, "s": 0, "t": 1, "b": 1}
    for p in (5, 7, 11, 13):
        res = tw.twisted_alexander(k, tw.TensorRep(rep("alpha_k"), ch, p))
        assert res.vanishes and res.free_rank > 0 and res.monic_mod_p == tw.MONIC_NO


@pytest.mark.slow
def test_k_vanishes_large_primes():
    k = grp("pi1_k")
    for p in (17, 19, 23, 29):
        assert tw.twisted_alexander(k, tw.TensorRep(rep("alpha_k"), char_of(k, (1,)), p)).vanishes


def test_trefoil_trivial():
    t = grp("trefoil")
    for p in (5, 7, 11, 13):
        res = tw.twisted_alexander(t, tw.TensorRep(trivial_rep(), TREFOIL_CHAR, p))
        assert res.delta == F("1 - t + t^2", p)
        assert res.delta_zero == F("t - 1", p)
        assert res.h1_order == F("1 - t + t^2", p)
        # agrees with the splice computation reduced mod p
        en = sp.en_alexander(sp.load_splice(FIXTURES / "splice" / "trefoil.splice"))
        assert res.delta.associate(en.reduce_mod(p))


def test_wirtinger_trefoil_column_independence():
    c, arcs = pres.parse_crossings((FIXTURES / "groups" / "trefoil.wirt").read_text())
    w = pres.wirtinger(c, arcs)
    ch = {a: 1 for a in w.generators}
    polys = [tw.twisted_alexander(w, tw.TensorRep(trivial_rep(), ch, 7), d).delta for d in w.generators]
    assert all(f.associate(F("t^2 - t + 1", 7)) for f in polys)


def test_column_deletion_independence():
    t = grp("trefoil")
    a = [tw.twisted_alexander(t, tw.TensorRep(trivial_rep(), TREFOIL_CHAR, 7), d).delta for d in "xy"]
    assert a[0].associate(a[1])
    lb = grp("pi1_l_beta")
    ch = char_of(lb, (0, 1))
    results = [tw.twisted_alexander(lb, tw.TensorRep(trivial_rep(), ch, 13), d)
               for d in tw.admissible_generators(lb, ch)]
    assert len(results) >= 2
    assert all(r.vanishes for r in results)
    assert all(r.delta_tilde.associate(results[0].delta_tilde) for r in results)
    # and with a degree-5 representation on K
    k = grp("pi1_k")
    chk = char_of(k, (1,))
    for d in tw.admissible_generators(k, chk):
        assert tw.twisted_alexander(k, tw.TensorRep(rep("alpha_k"), chk, 5), d).vanishes


def test_l_beta_l_gamma_tilde():
    for name in ("pi1_l_beta", "pi1_l_gamma"):
        g = grp(name)
        res = tw.twisted_alexander(g, tw.TensorRep(trivial_rep(), char_of(g, (0, 1)), 13))
        assert res.vanishes
        assert res.delta_tilde.associate(F("1 - t + t^2", 13))
        assert tw.tilde_norm_bound(res.delta_tilde, 1) == 1


def test_l_alpha_vanishing():
    g = grp("pi1_l_alpha")
    r1 = tw.twisted_alexander(g, tw.TensorRep(rep("alpha1_l_alpha"), char_of(g, (0, 1)), 7))
    r2 = tw.twisted_alexander(g, tw.TensorRep(rep("alpha2_l_alpha"), char_of(g, (1, -1)), 5))
    assert r1.vanishes and r2.vanishes


@pytest.mark.slow
def test_l_alpha_vanishing_other_primes():
    g = grp("pi1_l_alpha")
    for p in (11, 13, 17, 19, 23, 29):
        assert tw.twisted_alexander(g, tw.TensorRep(rep("alpha1_l_alpha"), char_of(g, (0, 1)), p)).vanishes
    for p in (7, 11, 13, 17, 19, 23, 29):
        assert tw.twisted_alexander(g, tw.TensorRep(rep("alpha2_l_alpha"), char_of(g, (1, -1)), p)).vanishes


def test_delta_zero_examples():
    t = grp("trefoil")
    assert tw.delta_zero(t, tw.TensorRep(trivial_rep(), TREFOIL_CHAR, 7)) == F("t - 1", 7)
    k = grp("pi1_k")
    d0 = tw.delta_zero(k, tw.TensorRep(rep("alpha_k"), char_of(k, (1,)), 5))
    assert not d0.is_zero()
    # the all-ones vector is fixed by every permutation, so t - 1 divides
    assert gcd_univariate(d0, F("t - 1", 5)) == F("t - 1", 5)


def test_delta_zero_matches_snf():
    k = grp("pi1_k")
    phi = tw.TensorRep(rep("alpha_k"), char_of(k, (1,)), 7)
    rows = []
    one = F("1", 7)
    for n in k.generators:
        m = phi.matrix(k.word(n), k.generators)
        rows += [[m[i][j] - (one if i == j else F("0", 7)) for j in range(5)] for i in range(5)]
    res = smith_normal_form(rows)
    prod = one
    for d in res.diagonal:
        prod = prod * d
    assert prod.associate(tw.delta_zero(k, phi))


def test_column_factor():
    phi = tw.TensorRep(PermRep(3, {"x": (2, 1, 3)}), {"x": 2}, 5)
    assert tw.column_factor(phi, "x") == F("(t^4 - 1)(t^2 - 1)", 5).normalize()


def test_fk_reports():
    t = grp("trefoil")
    res = tw.twisted_alexander(t, tw.TensorRep(trivial_rep(), TREFOIL_CHAR, 7))
    rep_ = tw.fk_degree_test(res, 1, 1)
    assert (rep_.degree_lhs, rep_.degree_rhs, rep_.delta_zero_degree, rep_.delta_two_degree) == (2, 2, 1, 0)
    assert not rep_.obstructed and "Delta_2" in rep_.convention
    k = grp("pi1_k")
    res = tw.twisted_alexander(k, tw.TensorRep(rep("alpha_k"), char_of(k, (1,)), 5))
    assert tw.fk_degree_test(res, 5, 1).obstructed
    g = grp("pi1_l_alpha")
    res = tw.twisted_alexander(g, tw.TensorRep(rep("alpha1_l_alpha"), char_of(g, (0, 1)), 7))
    report = tw.fk_degree_test(res, 5, 7)
    assert report.obstructed and report.reason == "vanishes"
    # a wrong norm shows up as a degree mismatch
    res = tw.twisted_alexander(t, tw.TensorRep(trivial_rep(), TREFOIL_CHAR, 7))
    assert tw.fk_degree_test(res, 1, 3).reason == "degree_mismatch"


def test_tilde_norm_bound():
    assert tw.tilde_norm_bound(F("1 - t + t^2", 13), 1) == 1
    assert tw.tilde_norm_bound(F("4", 13), 1) == -1
    assert tw.tilde_norm_bound(F("t^10 + 1", 13), 5) == 1
    with pytest.raises(ZeroPolynomialError):
        tw.tilde_norm_bound(F("0", 13), 1)


def test_errors():
    t = grp("trefoil")
    with pytest.raises(tw.CharacterError):
        tw.twisted_alexander(t, tw.TensorRep(trivial_rep(), {"x": 1, "y": 2}, 7))
    with pytest.raises(tw.NoAdmissibleColumnError):
        tw.twisted_alexander(t, tw.TensorRep(trivial_rep(), {"x": 0, "y": 0}, 7))
    k = grp("pi1_k")
    with pytest.raises(tw.NoAdmissibleColumnError):
        tw.twisted_alexander(k, tw.TensorRep(rep("alpha_k"), char_of(k, (1,)), 5), "x")
    with pytest.raises(pres.MissingImageError):
        tw.twisted_alexander(t, tw.TensorRep(PermRep(2, {"x": (2, 1)}), TREFOIL_CHAR, 7))


def _matmul(A, B):
    zero = A[0][0] - A[0][0]
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), zero) for j in range(len(B[0]))]
            for i in range(len(A))]


def test_multiplicativity():
    rng = random.Random(9)
    cases = [("pi1_k", rep("alpha_k"), (1,)), ("pi1_l_alpha", rep("alpha1_l_alpha"), (0, 1)),
             ("pi1_l_alpha", rep("alpha2_l_alpha"), (1, -1)), ("trefoil", trivial_rep(), (1,))]
    for name, r, cls in cases:
        g = grp(name)
        phi = tw.TensorRep(r, char_of(g, cls), 7)
        for _ in range(100):
            u = tuple((rng.randrange(g.ngens), rng.choice((1, -1))) for _ in range(rng.randint(0, 6)))
            v = tuple((rng.randrange(g.ngens), rng.choice((1, -1))) for _ in range(rng.randint(0, 6)))
            assert phi.matrix(u + v, g.generators) == _matmul(phi.matrix(u, g.generators),
                                                              phi.matrix(v, g.generators))


def _det(M, zero, one):
    if not M:
        return one
    total = zero
    for j in range(len(M)):
        term = M[0][j] * _det([row[:j] + row[j + 1:] for row in M[1:]], zero, one)
        total = total + term if j % 2 == 0 else total - term
    return total


def test_snf_route_matches_minor_oracle():
    rng = random.Random(21)
    p = 5
    zero, one = F("0", p), F("1", p)
    checked = 0
    for trial in range(60):
        n = rng.randint(2, 3)
        names = tuple("xyz"[:n])
        char = {a: rng.choice((1, 1, 2, -1)) for a in names}
        rels = []
        for _ in range(rng.randint(1, 3)):
            w = [(rng.randrange(n), rng.choice((1, -1))) for _ in range(rng.randint(1, 6))]
            total = sum(s * char[names[g]] for g, s in w)
            # close up with powers of a generator of character +-1
            a = next(i for i in range(n) if abs(char[names[i]]) == 1) if any(
                abs(char[x]) == 1 for x in names) else None
            if a is None:
                break
            sgn = char[names[a]]
            w += [(a, -1 if total * sgn > 0 else 1)] * abs(total)
            rels.append(pres.free_reduce(w))
        else:
            k = 2
            g = pres.GroupPresentation(names, rels)
            r = PermRep(k, {a: tuple(rng.sample([1, 2], 2)) for a in names})
            phi = tw.TensorRep(r, char, p)
            deleted = tw.admissible_generators(g, char)[0]
            res = tw.twisted_alexander(g, phi, deleted)
            M = tw.alexander_matrix(g, phi)
            j = g.index(deleted)
            cols = [c for c in range(n * k) if c // k != j]
            A = [[row[c] for c in cols] for row in M]
            m, nc = len(A), len(cols)
            if m < nc:
                assert res.vanishes
                continue
            acc = zero
            for rows in combinations(range(m), nc):
                acc = gcd_univariate(acc, _det([A[i] for i in rows], zero, one))
            if acc.is_zero():
                assert res.vanishes
            else:
                assert res.delta.associate(acc)
                assert res.delta == res.delta_tilde
            checked += 1
    assert checked > 10


def test_nonzero_delta_equals_tilde():
    t = grp("trefoil")
    for p in (5, 7, 13):
        res = tw.twisted_alexander(t, tw.TensorRep(trivial_rep(), TREFOIL_CHAR, p))
        assert res.delta == res.delta_tilde


def test_sweep_and_verdict():
    t = grp("trefoil")
    results = tw.twisted_sweep(t, trivial_rep(), TREFOIL_CHAR, (5, 7, 13))
    assert [r.prime for r in results] == [5, 7, 13]
    assert tw.monic_verdict(results) == tw.MONIC_NEEDS_Z
    k = grp("pi1_k")
    results = tw.twisted_sweep(k, rep("alpha_k"), char_of(k, (1,)), (5, 7))
    assert tw.monic_verdict(results) == tw.MONIC_NO


def test_degree_drop_marks_unknown():
    # x y^5 x^-1 = y gives 5t - 1 over Z; the leading coefficient dies mod 5
    g = pres.parse_presentation("gens: x y\nrel: x y^5 x^-1 y^-1\n")
    ch = {"x": 1, "y": 0}
    r5, r7 = tw.twisted_sweep(g, trivial_rep(), ch, (5, 7))
    assert r7.delta.associate(F("5t - 1", 7)) and r7.monic_mod_p != tw.MONIC_UNKNOWN
    assert r5.delta_degree() == 0 and r5.monic_mod_p == tw.MONIC_UNKNOWN
    assert tw.monic_verdict([r5, r7]) == tw.MONIC_NO
    assert tw.monic_verdict([r7]) == tw.MONIC_NEEDS_Z


def test_result_dict():
    t = grp("trefoil")
    d = tw.twisted_alexander(t, tw.TensorRep(trivial_rep(), TREFOIL_CHAR, 7)).to_dict()
    assert d["delta"] == "1 - t + t^2" and d["free_rank"] == 0 and d["prime"] == 7
