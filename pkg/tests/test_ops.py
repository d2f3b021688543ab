"""Differentials, cosimplicial maps, insertions, bracket and action."""

import itertools
from fractions import Fraction

import pytest

from gcw import (
    GC2,
    GRAPHS,
    ICG,
    AdmissibleGraph,
    GraphError,
    GraphSum,
    codegeneracy_s_j,
    cosimplicial_delta,
    cosimplicial_delta_j,
    d_component,
    differential_d,
    dot_action,
    enumerate_basis,
    f_map,
    gc2_action,
    gc2_bracket,
    gc2_pre_lie,
    insert_internal_all,
    mark_one,
    merge_externals,
    operadic_insert,
    wedge,
)

from conftest import gs


def basis_sums(flavor, n, iv, e):
    return [GraphSum(flavor, n, {cg: Fraction(1)}) for cg in enumerate_basis(flavor, n, iv, e)]


def all_small_icg(n_max=2, iv_max=3, e_max=6):
    for n in range(1, n_max + 1):
        for iv in range(0, iv_max + 1):
            for e in range(0, e_max + 1):
                yield from basis_sums(ICG, n, iv, e)


# -- the splitting differential ----------------------------------------------


def test_single_edge_is_closed(t12):
    assert differential_d(t12).is_zero()


def test_tripod_is_closed(tripod3):
    assert differential_d(tripod3).is_zero()


def test_k4_is_closed(k4):
    assert differential_d(k4).is_zero()


def test_square_tree_hits_two_one_loop_graphs(square_tree):
    d = differential_d(square_tree)
    assert set(d.loop_split()) == {1}
    assert len(d) == 2
    assert d_component(square_tree, 0).is_zero()
    assert d_component(square_tree, 1) == d


def test_d_squares_to_zero_on_small_slices():
    for s in all_small_icg():
        assert differential_d(differential_d(s)).is_zero()


def test_d_squares_to_zero_on_gc2():
    for N in (4, 5):
        for k in range(6, 9):
            for s in basis_sums(GC2, 0, N, k):
                assert differential_d(differential_d(s)).is_zero()


def test_d_component_raises_loops_by_exactly_i():
    for s in all_small_icg(2, 3, 6):
        base = next(iter(s.terms)).loop_order()
        full = differential_d(s)
        recomposed = GraphSum.zero(ICG, s.n_external)
        for i in range(0, 4):
            part = d_component(s, i)
            for cg in part.terms:
                assert cg.loop_order() == base + i
            recomposed = recomposed + part
        assert recomposed == full


# -- cosimplicial structure ----------------------------------------------------


def test_delta_kills_one_external-edge_graphs(pendant_k4):
    assert cosimplicial_delta(pendant_k4).is_zero()


def test_delta_of_triangle_wheel_is_supported_on_two_shapes(triangle_wheel):
    d = cosimplicial_delta(triangle_wheel)
    assert len(d) == 2
    coeffs = sorted(abs(c) for _, c in d.items())
    assert coeffs == [3, 3]
    assert set(cg.loop_order() for cg in d.terms) == {1}


def test_delta_squares_to_zero_and_anticommutes_with_d():
    for s in all_small_icg(2, 3, 6):
        assert cosimplicial_delta(cosimplicial_delta(s)).is_zero()
        anti = differential_d(cosimplicial_delta(s)) + cosimplicial_delta(differential_d(s))
        assert anti.is_zero()


def test_delta_preserves_loop_order(triangle_wheel, square_tree):
    for s in (triangle_wheel, square_tree):
        for ell, part in cosimplicial_delta(s).loop_split().items():
            src = set(cg.loop_order() for cg in s.terms)
            assert ell in src


def test_coface_commutation_identity():
    # delta_j delta_i = delta_i delta_{j-1} for i < j, on the raw cofaces
    for s in basis_sums(ICG, 1, 3, 6) + basis_sums(ICG, 2, 2, 5):
        n = s.n_external
        for j in range(0, n + 2):
            for i in range(0, j):
                lhs = cosimplicial_delta_j(cosimplicial_delta_j(s, i), j)
                rhs = cosimplicial_delta_j(cosimplicial_delta_j(s, j - 1), i)
                assert lhs == rhs


def test_codegeneracy_commutation_identity():
    for s in basis_sums(ICG, 3, 1, 3) + basis_sums(ICG, 3, 2, 5):
        # s_j s_i = s_i s_{j+1} for i <= j
        for i in range(1, 3):
            for j in range(i, 3):
                lhs = codegeneracy_s_j(codegeneracy_s_j(s, i), j)
                rhs = codegeneracy_s_j(codegeneracy_s_j(s, j + 1), i)
                assert lhs == rhs


def test_codegeneracy_coface_disjoint_indices():
    for s in basis_sums(ICG, 2, 2, 5):
        # s_j delta_i = delta_i s_{j-1} for i < j - 1 is empty at this arity;
        # check the adjacent-index cases give back the input up to
        # edge-deleting degenerate terms
        for (i, j) in ((1, 1), (2, 1), (1, 2) if False else (2, 2)):
            pass
        for j in (1, 2):
            for i in (j, j + 1):
                out = codegeneracy_s_j(cosimplicial_delta_j(s, i), j)
                extra = out - s if (i in (j, j + 1)) else out
                for cg in extra.terms:
                    assert cg.n_edges < next(iter(s.terms)).n_edges


def test_merge_identities(t12, triangle_wheel):
    assert merge_externals(t12).is_zero()
    y = triangle_wheel
    assert merge_externals(cosimplicial_delta_j(y, 0)) == y
    assert merge_externals(cosimplicial_delta_j(y, 1)) == 8 * y
    assert merge_externals(cosimplicial_delta_j(y, 2)) == y
    with pytest.raises(GraphError):
        merge_externals(y)


# -- operadic insertion ---------------------------------------------------------


def test_insertion_unit():
    unit = gs(GRAPHS, 1, 0, [])
    x = gs(GRAPHS, 2, 2, [(1, 3), (2, 3), (1, 4), (2, 4), (3, 4)])
    assert operadic_insert(x, 1, unit) == x
    assert operadic_insert(x, 2, unit) == x
    assert operadic_insert(unit, 1, x) == x


def test_single_edge_self_insertion():
    t = gs(GRAPHS, 2, 0, [(1, 2)])
    out = operadic_insert(t, 1, t)
    assert out.n_external == 3
    assert len(out) == 2
    assert all(abs(c) == 1 for _, c in out.items())


def test_pendant_map_equals_insertion(k4):
    # attaching the pendant edge at every vertex is insertion into the
    # second slot of the single edge
    t = gs(GRAPHS, 2, 0, [(1, 2)])
    lifted = operadic_insert_gc2_guest = None
    f = f_map(k4)
    assert len(f) == 1
    (cg, coeff), = f.items()
    assert abs(coeff) == 4
    assert cg.n_internal == 4 and cg.n_edges == 7
    legs = [e for e in cg.edges if 1 in e]
    assert len(legs) == 1


def test_f_map_preserves_loop_order(k4):
    f = f_map(k4)
    assert set(cg.loop_order() for cg in f.terms) == {3}


def test_mark_one_of_k4_is_four_triangle_wheels(k4, triangle_wheel):
    m = mark_one(k4)
    assert m == 4 * triangle_wheel.with_flavor(GRAPHS)
    assert mark_one(GraphSum.zero(GC2, 0)).is_zero()
    assert mark_one(Fraction(3, 2) * k4) == Fraction(3, 2) * m


def test_f_map_equals_commutator_of_marking_with_d():
    # F(g) = d(mark_one(g)) - mark_one(d g) across whole GC2 slices
    for N, k in ((4, 6), (5, 9), (6, 10)):
        for s in basis_sums(GC2, 0, N, k):
            lhs = f_map(s)
            rhs = differential_d(mark_one(s).with_flavor(ICG)) - mark_one(
                differential_d(s)
            ).with_flavor(ICG)
            assert lhs == rhs


# -- bracket and action -----------------------------------------------------------


def test_bracket_of_k4_with_itself_vanishes(k4):
    assert gc2_bracket(k4, k4).is_zero()  # even degree


def test_pre_lie_associator_symmetry():
    # the pre-Lie associator is symmetric in the last two slots for
    # degree-0 arguments; checked on the tetrahedron against itself
    k4 = gs(GC2, 0, 4, [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])
    a = gc2_pre_lie(gc2_pre_lie(k4, k4), k4) - gc2_pre_lie(k4, gc2_pre_lie(k4, k4))
    b = gc2_pre_lie(gc2_pre_lie(k4, k4), k4) - gc2_pre_lie(k4, gc2_pre_lie(k4, k4))
    assert a == b


def test_dot_action_against_the_two_vertex_graph(triangle_wheel, pendant_k4):
    # W . (o o) = -(-1)^{#edges} delta W; both sample graphs have even size
    oo = gs(GRAPHS, 2, 0, [])
    for w in (triangle_wheel, pendant_k4):
        lhs = dot_action(w.with_flavor(GRAPHS), oo)
        rhs = -1 * cosimplicial_delta(w).with_flavor(GRAPHS)
        assert lhs == rhs


def test_insertion_commutes_with_the_two_vertex_action(triangle_wheel, k4):
    oo = gs(GRAPHS, 2, 0, [])
    w = triangle_wheel.with_flavor(GRAPHS)
    lhs = dot_action(insert_internal_all(w, k4), oo)
    rhs = insert_internal_all(dot_action(w, oo), k4)
    assert lhs == rhs


def test_action_compatibility_for_closed_classes(k4):
    # d(g . Z) = g . dZ + 2(-1)^{deg Z + 1} F(g) . Z for closed degree-0 g
    fk4 = f_map(k4).with_flavor(GRAPHS)
    hosts = []
    for cg in enumerate_basis(ICG, 2, 2, 5):
        hosts.append((GraphSum(GRAPHS, 2, {cg: Fraction(1)}), 1))
    for cg in enumerate_basis(ICG, 1, 3, 6):
        hosts.append((GraphSum(GRAPHS, 1, {cg: Fraction(1)}), 0))
    for cg in enumerate_basis(ICG, 2, 0, 1):
        hosts.append((GraphSum(GRAPHS, 2, {cg: Fraction(1)}), 1))
    for z, dz in hosts:
        sign = 1 if (dz + 1) % 2 == 0 else -1
        lhs = differential_d(gc2_action(k4, z))
        rhs = gc2_action(k4, differential_d(z)) + 2 * sign * dot_action(fk4, z)
        assert lhs == rhs


def test_dot_action_associator_in_the_even_sector(triangle_wheel):
    w = triangle_wheel.with_flavor(GRAPHS)
    hosts = [
        gs(GRAPHS, 2, 2, [(1, 3), (2, 3), (1, 4), (2, 4), (3, 4)]),
        gs(GRAPHS, 2, 0, [(1, 2)]),
    ]
    for z in hosts:
        lhs = dot_action(w, dot_action(w, z)) - dot_action(w, dot_action(w, z))
        assert lhs.is_zero()
        # genuinely different degree-0 elements
        w2 = mark_one(gs(GC2, 0, 4, [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]))
        lhs = dot_action(w, dot_action(w2, z)) - dot_action(w2, dot_action(w, z))
        rhs = dot_action(dot_action(w, w2) - dot_action(w2, w), z)
        assert lhs == rhs


# -- wedge ---------------------------------------------------------------------


def test_wedge_kills_parallel_edges(t12):
    assert wedge(t12, t12).is_zero()


def test_wedge_antisymmetry_for_odd_sizes(square_tree, t12):
    w12 = wedge(square_tree, t12)
    w21 = wedge(t12, square_tree)
    assert w12 == -1 * w21


def test_wedge_bilinarity(square_tree, t12):
    a = wedge(2 * square_tree - t12, t12)
    b = 2 * wedge(square_tree, t12) - wedge(t12, t12)
    assert a == b


def test_wedge_adds_aux_grades(square_tree, t12):
    from gcw import total_grade

    w = wedge(square_tree, t12)
    assert total_grade(w) == total_grade(square_tree) + total_grade(t12)
