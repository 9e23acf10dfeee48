import pytest

from corpus import diagonal, single
from formalrings.analysis import Permutation, classify, detect_nakayama_direct
from formalrings.constructions import (
    compatible_finite_fields,
    cycle_ring,
    glue,
    glue_general,
    prepare_glue,
    ring_from_name,
    serial_quiver_algebra,
    support_pattern_ring,
    trivial_extension,
)
from formalrings.errors import AssumptionFailed, BadEnvelope, PrerequisiteFailed, UnresolvedReference
from formalrings.formal import corner
from formalrings.modules import regular_bimodule
from formalrings.rings import galois_field, square_zero_local, truncated_polynomial, zmod


def shifts(R):
    n = R.order
    return sorted({(j - i) % n for i, j in R.support if i != j})


@pytest.mark.parametrize("n,I,expected", [(5, [], [1]), (5, [2], [1, 2, 4]), (3, [2], [1, 2]), (4, [2, 3], [1, 2, 3])])
def test_support_pattern_shifts(n, I, expected):
    assert shifts(support_pattern_ring(n, I, zmod(4))) == expected


def test_plain_support_pattern_is_the_cycle_ring():
    assert support_pattern_ring(5, [], zmod(4)).same_tables(cycle_ring(zmod(4), n=5))


def test_serial_algebra_small_cases():
    R = serial_quiver_algebra(2, 1, 2)
    assert R.rings[0].same_tables(truncated_polynomial(2, 2))
    R = serial_quiver_algebra(2, 3, 6)
    assert [R.row_size(i) for i in range(3)] == [64] * 3
    for i in range(3):
        a, b, c = i, (i + 1) % 3, (i + 2) % 3
        assert (R.products[(a, b, a)] != 0).any()
        assert (R.products[(a, b, c)] != 0).any()


def test_cycle_ring_defaults_and_order_one():
    assert cycle_ring(zmod(4), n=1).order == 1
    sq = square_zero_local(2, 2)
    with pytest.raises(BadEnvelope):
        cycle_ring(sq, regular_bimodule(sq), n=2)
    # the default envelope of a non-self-injective base is its injective hull
    R = cycle_ring(sq, n=2)
    assert R.bimodules[0][1].size == 8
    assert detect_nakayama_direct(R) == Permutation.cycle(2)


def test_compatible_fields():
    for q, t in ((4, 1), (2, 0), (9, 0), (9, 1), (8, 2)):
        pair = compatible_finite_fields(q, t)
        assert pair.K.size == q and pair.kl.size == q and pair.lk.size == q


def test_trivial_extension_sizes():
    assert trivial_extension(galois_field(3)).size == 9
    assert ring_from_name("trivext(GF(4),twist=1)").size == 16


@pytest.mark.parametrize("name", ["GF(6)", "Z/1", "foo", "trivext(Z/4,twist=1)"])
def test_unresolved_names(name):
    with pytest.raises(UnresolvedReference):
        ring_from_name(name)


def test_glue_examples():
    te = single("trivext(GF(2))")
    assert classify(glue(te, te)).nakayama == Permutation.identity(2)
    G = glue(cycle_ring(zmod(4), n=2), te)
    assert str(classify(G).nakayama) == "(1 2)(3)"
    C = cycle_ring(zmod(4), n=3)
    assert str(classify(glue(C, C)).nakayama) == "(1 2 3)(4 5 6)"


def test_glue_corners_round_trip():
    S, S2 = cycle_ring(truncated_polynomial(2, 2), n=2), serial_quiver_algebra(2, 2, 4)
    G = glue(S, S2)
    assert corner(G, [0, 1]).same_tables(S)
    assert corner(G, [2, 3]).same_tables(S2)


def test_glue_with_twist():
    te4 = single("trivext(GF(4))")
    G = glue(te4, te4, pair=compatible_finite_fields(4, 1))
    assert classify(G).nakayama == Permutation.identity(2)


def test_four_block_glue_on_cycle_unions():
    S = diagonal("trivext(GF(2))", "Z/4")
    S2 = cycle_ring(zmod(4), n=2)
    G = glue_general(S, S2, I=[0], J=[0, 1])
    rep = classify(G)
    assert str(rep.nakayama) == "(1)(2)(3 4)"
    assert rep.right_socle_essential and rep.left_socle_essential


@pytest.mark.parametrize("letter,left,right", [
    ("A", lambda: diagonal("trivext(GF(2))", "trivext(GF(4))"), lambda: single("trivext(GF(2))")),
    ("A'", lambda: single("trivext(GF(2))"), lambda: diagonal("trivext(GF(2))", "trivext(GF(4))")),
    ("B", lambda: single("trivext(GF(2))"), lambda: single("trivext(GF(4))")),
    ("C", lambda: single("trivext(GF(4),twist=1)"), lambda: single("trivext(GF(4))")),
    ("C'", lambda: single("trivext(GF(4))"), lambda: single("trivext(GF(4),twist=1)")),
    ("D", lambda: single("GF(2)"), lambda: single("trivext(GF(2))")),
    ("D'", lambda: single("trivext(GF(2))"), lambda: single("GF(2)")),
])
def test_glue_condition_failures(letter, left, right):
    with pytest.raises(AssumptionFailed) as exc:
        prepare_glue(left(), right())
    assert exc.value.condition == letter


def test_glue_needs_nakayama_inputs():
    with pytest.raises(PrerequisiteFailed):
        glue(single("GF(2)[x,y]/(x^2,xy,y^2)"), single("trivext(GF(2))"))
