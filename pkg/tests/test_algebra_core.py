import numpy as np
import pytest

from formalrings.constructions import ring_from_name
from formalrings.errors import AxiomViolation
from formalrings.modules import (
    Submodule,
    character_module,
    injective_envelope,
    is_essential,
    is_injective,
    is_simple,
    module_isomorphic,
    quotient_module,
    regular_bimodule,
    residue_bimodule,
    socle,
    socle_by_simples,
    submodule_module,
    top,
    validate_module,
)
from formalrings.rings import (
    field_automorphisms,
    field_isomorphisms,
    frobenius,
    galois_field,
    residue_field,
    square_zero_local,
    truncated_polynomial,
    validate_ring,
    zmod,
)


def test_corrupted_table_is_rejected_with_witness():
    Z4 = zmod(4)
    mul = Z4.mul.copy()
    mul[2, 3] = 1
    with pytest.raises(AxiomViolation) as exc:
        validate_ring(Z4.add, mul, 0, 1)
    assert exc.value.witness is not None


def test_units_and_radical_of_dual_numbers():
    P = truncated_polynomial(2, 2)
    assert [P.label(u) for u in sorted(P.units)] == ["1", "1+x"]
    assert P.is_local and not P.is_field


def test_trivial_extension_radical():
    te = ring_from_name("trivext(GF(2))")
    assert te.size == 4
    assert sorted(te.label(x) for x in te.radical) == ["(0,0)", "(0,1)"]
    assert ring_from_name("trivext(GF(3))").size == 9


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 16])
def test_galois_fields(q):
    F = galois_field(q)
    assert F.is_field and F.size == q
    assert len(field_automorphisms(F)) == {2: 1, 3: 1, 4: 2, 5: 1, 7: 1, 8: 3, 9: 2, 16: 4}[q]


def test_frobenius_on_gf9_cubes():
    F = galois_field(9)
    assert frobenius(F).tolist() == [F.power(x, 3) for x in range(9)]


def test_field_isomorphisms_between_equal_sizes_only():
    assert field_isomorphisms(galois_field(4), galois_field(4), first_only=True)
    assert not field_isomorphisms(galois_field(4), galois_field(2))


def test_residue_fields():
    assert residue_field(zmod(4)).residue_field.size == 2
    assert residue_field(zmod(9)).residue_field.size == 3
    assert residue_field(ring_from_name("trivext(GF(4))")).residue_field.size == 4


def test_socle_examples():
    Z4 = regular_bimodule(zmod(4)).as_right
    assert socle(Z4).elements == frozenset({0, 2})
    assert is_essential(Submodule(Z4, frozenset({0, 2})))
    sq = regular_bimodule(square_zero_local(2, 2)).as_right
    assert socle(sq) == socle_by_simples(sq)
    assert socle(sq).size == 4


def test_module_isomorphic_examples():
    Z4 = regular_bimodule(zmod(4)).as_right
    klein = np.array([[a ^ b for b in range(4)] for a in range(4)])
    act = np.array([[m if r % 2 else 0 for r in range(4)] for m in range(4)])
    F2xF2 = validate_module(zmod(4), "right", klein, act)
    assert module_isomorphic(Z4, F2xF2) is None
    assert module_isomorphic(F2xF2, F2xF2) is not None
    soc, _ = submodule_module(Z4, socle(Z4).elements)
    tp, _ = top(Z4)
    assert module_isomorphic(soc, tp) is not None
    assert is_simple(residue_bimodule(zmod(4), zmod(4)).as_right)


def test_quotient_by_socle():
    Z4 = regular_bimodule(zmod(4)).as_right
    Q, proj = quotient_module(Z4, socle(Z4).elements)
    assert Q.size == 2


@pytest.mark.parametrize("name", ["Z/4", "GF(2)[x]/(x^2)", "trivext(GF(2))", "GF(3)"])
def test_frobenius_local_rings_are_self_injective(name):
    R = ring_from_name(name)
    assert is_injective(regular_bimodule(R).as_right)


def test_square_zero_local_ring_is_not_self_injective():
    R = square_zero_local(2, 2)
    assert not is_injective(regular_bimodule(R).as_right)
    T, _ = top(regular_bimodule(R).as_right)
    E, emb = injective_envelope(T)
    # the envelope of the simple module is the character dual, of size |R|
    assert E.size == R.size
    assert emb.is_homomorphism() and emb.is_injective()


def test_character_module_is_balanced_dual():
    R = zmod(4)
    C = character_module(R)
    assert C.size == R.size
    assert module_isomorphic(C.as_right, regular_bimodule(R).as_right) is not None
