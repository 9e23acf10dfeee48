import numpy as np
import pytest

from formalrings.analysis import ring_hash
from formalrings.constructions import ring_from_name
from formalrings.enumerate import (
    EnumerationJob,
    abelian_groups,
    automorphisms,
    bimodules,
    endomorphisms,
    random_instances,
    run_job,
)
from formalrings.specio import emit_spec, load_ring


def test_nontrivial_abelian_groups_up_to_four():
    # Z/2, Z/3, Z/4, Z/2 x Z/2; the zero group is handled separately
    assert sorted(len(g) for g in abelian_groups(4)) == [2, 3, 4, 4]


def test_group_maps_of_klein_group():
    klein = np.array([[a ^ b for b in range(4)] for a in range(4)])
    assert len(endomorphisms(klein)) == 16
    assert len(automorphisms(klein)) == 6
    assert len(automorphisms(ring_from_name("Z/4").add)) == 2


@pytest.mark.parametrize("left,right,count", [
    ("GF(2)", "GF(2)", 3),
    ("Z/4", "Z/4", 4),
    ("GF(2)[x]/(x^2)", "GF(2)[x]/(x^2)", 6),
])
def test_bimodule_class_counts(left, right, count):
    # counted by hand up to isomorphism, carriers of size at most 4, zero included
    assert len(bimodules(ring_from_name(left), ring_from_name(right), 4)) == count


def test_bimodules_exclude_zero_on_request():
    F = ring_from_name("GF(2)")
    assert len(bimodules(F, F, 4, include_zero=False)) == 2


def test_job_validation():
    with pytest.raises(ValueError):
        EnumerationJob(order=3, carrier_bound=4, menu=("GF(2)",))
    with pytest.raises(ValueError):
        EnumerationJob(order=2, carrier_bound=4, menu=("GF(2)",), mode="random")
    with pytest.raises(ValueError):
        EnumerationJob(order=2, carrier_bound=4, menu=("GF(2)",), checks=("nope",))


def test_empty_menu_gives_empty_census():
    census = run_job(EnumerationJob(order=2, carrier_bound=4, menu=()))
    assert census.unique == 0 and census.generated == 0 and census.passed


def test_small_exhaustive_job_has_no_discrepancies():
    census = run_job(EnumerationJob(order=2, carrier_bound=2, menu=("GF(2)",)), keep_rings=True)
    assert census.passed
    assert census.unique == len(census.rings) > 0
    assert census.nakayama + census.no_nakayama == census.unique
    # the cycle ring over GF(2) is among them
    assert census.nakayama >= 2
    assert len({ring_hash(R) for R in census.rings}) == census.unique


def test_random_instances_are_seeded():
    job = EnumerationJob(order=3, carrier_bound=2, menu=("GF(2)", "Z/4"), mode="random", seed=5, count=6)
    first = [ring_hash(R) for R, _ in random_instances(job)]
    second = [ring_hash(R) for R, _ in random_instances(job)]
    assert first == second and len(first) == 6


def test_census_dict_is_stable_and_rings_round_trip():
    job = EnumerationJob(order=3, carrier_bound=2, menu=("GF(2)",), mode="random", seed=2, count=4)
    a = run_job(job, keep_rings=True)
    b = run_job(job)
    da, db = a.to_dict(), b.to_dict()
    assert da == db
    assert "seconds" not in da
    for R in a.rings:
        assert load_ring(emit_spec(R)).same_tables(R)
