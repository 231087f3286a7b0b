from __future__ import annotations

import itertools

import pytest

from meadowkit.congruence import (
    CarrierTooLarge,
    Congruence,
    FiniteAlgebra,
    all_congruences,
    brute_force_congruences,
    is_compatible,
    is_simple,
    is_subdirectly_irreducible,
    principal_congruence,
    set_partitions,
    subdirect_decompose,
)
from meadowkit.meadows import make_meadow
from meadowkit.modelcheck import check_il
from meadowkit.signexp import EqMeadow

BELL = [1, 1, 2, 5, 15, 52, 203, 877]


def test_set_partitions_count():
    for n, b in enumerate(BELL):
        assert sum(1 for _ in set_partitions(n)) == b


def test_principal_examples():
    z6 = make_meadow("zsf:6")
    c = principal_congruence(z6, 0, 3)
    assert c.blocks == ((0, 3), (1, 4), (2, 5))
    assert principal_congruence(make_meadow("zp:5"), 1, 2).is_total()
    assert principal_congruence(z6, 4, 4).is_diagonal()


@pytest.mark.parametrize(
    "desc,count",
    [("zp:2", 2), ("zp:3", 2), ("zp:5", 2), ("zp:7", 2), ("zsf:6", 4), ("zsf:30", 8), ("prod:[zp:2,zp:3]", 4)],
)
def test_congruence_counts(desc, count):
    assert len(all_congruences(make_meadow(desc))) == count


@pytest.mark.parametrize(
    "desc", ["zp:2", "zp:3", "zp:5", "zp:7", "zsf:6", "prod:[zp:2,zp:2]", "prod:[zp:2,zp:3]"]
)
def test_agrees_with_partition_oracle(desc):
    m = make_meadow(desc)
    assert all_congruences(m) == brute_force_congruences(m)


def test_eq_expansion_against_oracle():
    m = EqMeadow()
    assert all_congruences(m) == brute_force_congruences(m)
    assert len(all_congruences(m)) == 2
    assert all_congruences(m, reduct=True) == brute_force_congruences(m, reduct=True)
    assert len(all_congruences(m, reduct=True)) == 4


def test_every_congruence_is_compatible(finite_meadow):
    alg = FiniteAlgebra.from_meadow(finite_meadow)
    for c in all_congruences(alg):
        assert is_compatible(alg, c)


def test_simple_iff_inverse_law(finite_meadow):
    assert is_simple(finite_meadow) == check_il(finite_meadow).holds


def test_z30_lattice_is_kernels_of_subproducts():
    m = make_meadow("zsf:30")
    expected = set()
    for r in range(4):
        for ps in itertools.combinations([2, 3, 5], r):
            mod = 1
            for p in ps:
                mod *= p
            expected.add(Congruence.from_labels([a % mod for a in range(30)]))
    assert set(all_congruences(m)) == expected


def test_subdirect_irreducibility():
    for p in (2, 3, 5, 7):
        si, mono = is_subdirectly_irreducible(make_meadow(f"zp:{p}"))
        assert si and mono.is_total()
    assert is_subdirectly_irreducible(make_meadow("zsf:6")) == (False, None)
    si, mono = is_subdirectly_irreducible(EqMeadow())
    assert si and mono.is_total()
    assert is_simple(EqMeadow())
    assert not is_simple(EqMeadow(), reduct=True)


@pytest.mark.parametrize(
    "desc,sizes",
    [("zsf:6", [2, 3]), ("zp:2", [2]), ("zsf:30", [2, 3, 5]), ("prod:[zp:2,zp:2]", [2, 2])],
)
def test_subdirect_decomposition(desc, sizes):
    m = make_meadow(desc)
    d = subdirect_decompose(m)
    assert d.ok
    assert sorted(q.size for q in d.quotients) == sizes
    meet = d.congruences[0]
    for c in d.congruences[1:]:
        meet = meet.meet(c)
    assert meet.is_diagonal()


def test_z6_embedding_is_crt():
    d = subdirect_decompose(make_meadow("zsf:6"))
    assert [tuple(a % q.size for q in d.quotients) for a in range(6)] == d.embedding


def test_caps():
    with pytest.raises(CarrierTooLarge):
        brute_force_congruences(make_meadow("zsf:10"))
    with pytest.raises(CarrierTooLarge):
        all_congruences(make_meadow("zsf:70"))
    with pytest.raises(ValueError):
        all_congruences(make_meadow("q0"))


def test_lattice_is_closed_under_meet_and_join():
    m = make_meadow("prod:[zp:2,zp:3,zp:2]")
    lat = set(all_congruences(m))
    for a, b in itertools.combinations(lat, 2):
        assert a.meet(b) in lat
