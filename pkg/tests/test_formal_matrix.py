import numpy as np
import pytest

from corpus import frobenius_corpus, non_examples, single
from formalrings.constructions import cycle_ring, ring_from_name, support_pattern_ring
from formalrings.errors import AlphaViolation, BalanceViolation, NotBasic, NotLocal, SizeLimitExceeded
from formalrings.formal import (
    build,
    central_idempotent_blocks,
    check_beta,
    corner,
    element_code,
    flatten,
    is_indecomposable,
    multiply,
    opposite_formal,
    random_element,
    row_module_of_idempotent,
)
from formalrings.modules import regular_bimodule
from formalrings.rings import galois_field, zmod


def test_order_two_trivial_ring_flattens_to_sixteen():
    F2 = galois_field(2)
    reg = regular_bimodule(F2)
    R = build([F2, F2], [[None, reg], [reg, None]])
    assert flatten(R).size == 16


@pytest.mark.parametrize("label", ["cycle Z/4 n=2", "serial 2,2,4", "glue trivext(GF(2)) + trivext(GF(2))",
                                   "cycle trivext(GF(2)) n=2"])
def test_flatten_agrees_with_multiply(label):
    R = dict(frobenius_corpus())[label]
    F = flatten(R)
    rng = np.random.default_rng(7)
    for _ in range(1000):
        x, y = random_element(R, rng), random_element(R, rng)
        assert F.mul[element_code(R, x), element_code(R, y)] == element_code(R, multiply(x, y))
        assert F.add[element_code(R, x), element_code(R, y)] == element_code(R, x + y)


def test_flatten_respects_size_guard():
    with pytest.raises(SizeLimitExceeded):
        flatten(cycle_ring(zmod(4), n=3), limit=1024)


def test_non_local_diagonal_is_rejected():
    F2 = galois_field(2)
    reg = regular_bimodule(F2)
    flat = flatten(build([F2, F2], [[None, reg], [reg, None]]))
    with pytest.raises(NotLocal):
        build([flat], [[None]])


def test_build_errors_carry_witnesses():
    labels = dict(non_examples())
    with pytest.raises(AlphaViolation) as exc:
        labels["broken pairing product"]()
    assert exc.value.witness["indices"] == [1, 2, 1, 2]
    with pytest.raises(BalanceViolation) as exc:
        labels["unbalanced pairing product"]()
    assert exc.value.witness is not None
    with pytest.raises(NotBasic):
        labels["unit in B12 B21"]()


def test_corners_round_trip():
    R = support_pattern_ring(5, [2, 3], zmod(4))
    assert corner(R, range(5)).same_tables(R)
    C = corner(R, [0, 2])
    assert C.order == 2 and C.rings[0] is R.rings[0]


def test_opposite_is_involutive():
    for label, R in frobenius_corpus()[:30]:
        op = opposite_formal(R)
        assert opposite_formal(op) is R
        assert op.total_size == R.total_size


def test_blocks_and_indecomposability():
    assert is_indecomposable(cycle_ring(zmod(4), n=3))
    R = build([zmod(4), galois_field(2)], [[None, None], [None, None]])
    assert central_idempotent_blocks(R) == [[0], [1]]


@pytest.mark.parametrize("label", ["cycle Z/4 n=3", "serial 2,3,6", "support n=4 I=[2]"])
def test_row_modules_are_modules(label):
    R = dict(frobenius_corpus())[label]
    for i in range(R.order):
        M = row_module_of_idempotent(R, i)
        assert M.size == R.row_size(i)
        assert check_beta(M) is None


def test_single_ring_wrapper():
    R = single("trivext(GF(3))")
    assert R.order == 1 and R.total_size == 9
