"""Shared fixtures: the small named graphs every suite leans on."""

from fractions import Fraction

import pytest

from gcw import GC2, GRAPHS, ICG, AdmissibleGraph, GraphSum


def gs(flavor, n, iv, edges, coeff=1):
    return GraphSum.from_graph(AdmissibleGraph(n, iv, tuple(edges)), flavor, Fraction(coeff))


@pytest.fixture
def t12():
    """Single edge between the two external vertices."""
    return gs(ICG, 2, 0, [(1, 2)])


@pytest.fixture
def tripod3():
    """One internal vertex joined to three external vertices."""
    return gs(ICG, 3, 1, [(1, 4), (2, 4), (3, 4)])


@pytest.fixture
def square_tree():
    """Two bridged internal vertices, each joined to both externals."""
    return gs(ICG, 2, 2, [(1, 3), (2, 3), (1, 4), (2, 4), (3, 4)])


@pytest.fixture
def triangle_wheel():
    """Triangle of internal vertices, each with a leg to the external vertex."""
    return gs(ICG, 1, 3, [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])


@pytest.fixture
def k4():
    """The tetrahedron, as a vertex-graph class."""
    return gs(GC2, 0, 4, [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])


@pytest.fixture
def pendant_k4():
    """External vertex tied by one edge to a tetrahedron of internals."""
    return gs(ICG, 1, 4, [(1, 2), (2, 3), (2, 4), (2, 5), (3, 4), (3, 5), (4, 5)])
