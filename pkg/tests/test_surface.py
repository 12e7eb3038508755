import itertools
import json
from fractions import Fraction

import pytest

from quantum_duality.errors import InvalidTriangulation
from quantum_duality.qtorus import EpsilonForm, QMonomial, mono_mul
from quantum_duality.surface import (IdealTriangulation, automorphisms, builtin, load_surface,
                                     peripheral_vector, split)

SURFACES = ["punctured_torus", "sphere_4"]


def tensor_epsilon(T: IdealTriangulation) -> EpsilonForm:
    """Form on the 3T triangle generators: within a triangle, Z_k Z_(k+1) = w^2 Z_(k+1) Z_k."""
    m = 3 * T.num_triangles
    rows = [[0] * m for _ in range(m)]
    for t in range(T.num_triangles):
        for k in range(3):
            a, b = 3 * t + k, 3 * t + (k + 1) % 3
            rows[a][b] += 1
            rows[b][a] -= 1
    return EpsilonForm(tuple(map(tuple, rows)))


def edge_element(T: IdealTriangulation, e: int) -> QMonomial:
    p = [0] * (3 * T.num_triangles)
    for t, k in T.edge_sides[e]:
        p[3 * t + k] = 1
    return QMonomial(0, tuple(p))


@pytest.mark.parametrize("name", SURFACES)
def test_epsilon_matches_edge_elements_in_triangle_algebra(name):
    # Z_e Z_f = w^(2 e_ef) Z_f Z_e for edge elements built from the triangle algebras
    T = builtin(name)
    eps = T.epsilon_matrix()
    big = tensor_epsilon(T)
    for e, f in itertools.product(range(T.num_edges), repeat=2):
        ze, zf = edge_element(T, e), edge_element(T, f)
        lhs = mono_mul(ze, zf, big)
        rhs = mono_mul(zf, ze, big)
        assert lhs.exponents == rhs.exponents
        assert lhs.omega_power - rhs.omega_power == 2 * eps[e, f]


def test_punctured_torus_epsilon():
    eps = builtin("punctured_torus").epsilon_matrix()
    assert eps[0, 1] == eps[1, 2] == eps[2, 0] == 2
    assert eps.matrix == ((0, 2, -2), (-2, 0, 2), (2, -2, 0))


@pytest.mark.parametrize("name", SURFACES)
def test_epsilon_skew_and_bounded(name):
    eps = builtin(name).epsilon_matrix()
    for i, j in itertools.product(range(eps.n), repeat=2):
        assert eps[i, j] == -eps[j, i]
        assert abs(eps[i, j]) <= 2


def test_sphere_epsilon_entries():
    eps = builtin("sphere_4").epsilon_matrix()
    assert {x for row in eps.matrix for x in row} <= {-2, -1, 0, 1, 2}
    assert eps.matrix[0] == (0, -1, 1, 1, -1, 0)


@pytest.mark.parametrize("name", SURFACES)
def test_epsilon_invariant_under_relabelling_triangles_and_rotation(name):
    T = builtin(name)
    tris = list(T.triangles)
    corners = list(T.corners)
    order = list(reversed(range(len(tris))))
    rot = [(tris[t][1:] + tris[t][:1], corners[t][1:] + corners[t][:1]) for t in order]
    U = IdealTriangulation(T.num_edges, tuple(x for x, _ in rot), tuple(c for _, c in rot))
    assert U.epsilon_matrix() == T.epsilon_matrix()


@pytest.mark.parametrize("name", SURFACES)
def test_split_has_one_biangle_per_edge(name):
    T = builtin(name)
    S = split(T)
    assert len(S.biangles) == T.num_edges
    for b in S.biangles:
        assert {T.triangles[t][k] for t, k in (b.left, b.right)} == {b.edge}


def test_split_counts():
    assert split(builtin("punctured_torus")).n == 3
    assert builtin("punctured_torus").num_triangles == 2
    assert builtin("sphere_4").num_triangles == 4
    assert split(builtin("sphere_4")).n == 6


def test_punctured_torus_peripheral_vector():
    T = builtin("punctured_torus")
    (p,) = T.punctures
    assert peripheral_vector(T, p) == (1, 1, 1)
    assert T.genus == 1


def corner_graph_mu(T: IdealTriangulation, p) -> list[int]:
    # a small loop around p crosses each side adjacent to a corner at p; every
    # crossing point of an edge is seen from both of its sides
    mu = [0] * T.num_edges
    for t, labels in enumerate(T.corners):
        for c, lab in enumerate(labels):
            if lab == p:
                for k in (c, (c + 1) % 3):
                    mu[T.triangles[t][k]] += 1
    return [x // 2 for x in mu]


def test_sphere_peripheral_vectors():
    T = builtin("sphere_4")
    assert T.genus == 0
    assert len(T.punctures) == 4
    for p in T.punctures:
        v = peripheral_vector(T, p)
        assert set(v) <= {0, Fraction(1, 2), 1}
        assert [2 * x for x in v] == corner_graph_mu(T, p)


def test_punctured_torus_corner_graph():
    T = builtin("punctured_torus")
    assert corner_graph_mu(T, 1) == [2, 2, 2]


@pytest.mark.parametrize("name", SURFACES)
def test_peripheral_vectors_lie_in_kernel(name):
    T = builtin(name)
    eps = T.epsilon_matrix()
    for p in T.punctures:
        assert eps.apply(T.peripheral_mu(p)) == (0,) * T.num_edges


def test_unknown_puncture():
    with pytest.raises(ValueError):
        peripheral_vector(builtin("punctured_torus"), 9)


def test_self_folded_rejected():
    with pytest.raises(InvalidTriangulation, match="self-folded"):
        IdealTriangulation.from_dict({"edges": 2, "triangles": [[1, 1, 2]]})


def test_single_triangle_rejected():
    with pytest.raises(InvalidTriangulation):
        IdealTriangulation.from_dict({"edges": 3, "triangles": [[1, 2, 3]]})


def test_edge_used_three_times_rejected():
    with pytest.raises(InvalidTriangulation):
        IdealTriangulation.from_dict({"edges": 3, "triangles": [[1, 2, 3], [1, 2, 3], [1, 2, 3]]})


def test_inconsistent_corner_labels_rejected():
    with pytest.raises(InvalidTriangulation, match="inconsistent"):
        IdealTriangulation.from_dict({"edges": 3, "triangles": [[1, 2, 3], [1, 2, 3]],
                                      "corners": [[1, 1, 1], [1, 2, 1]]})


def test_corners_inferred_when_missing():
    T = IdealTriangulation.from_dict({"edges": 3, "triangles": [[1, 2, 3], [1, 2, 3]]})
    assert len(T.punctures) == 1
    assert T.epsilon_matrix() == builtin("punctured_torus").epsilon_matrix()


def test_json_round_trip(tmp_path):
    T = builtin("sphere_4")
    path = tmp_path / "s.json"
    path.write_text(json.dumps(T.to_dict()))
    U = load_surface(str(path))
    assert U == T
    assert load_surface("sphere_4") == T


def test_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(InvalidTriangulation):
        IdealTriangulation.load(path)


@pytest.mark.parametrize("name,count", [("punctured_torus", 6), ("sphere_4", 12)])
def test_automorphisms_preserve_epsilon(name, count):
    T = builtin(name)
    eps = T.epsilon_matrix()
    rot = automorphisms(T)
    both = automorphisms(T, reflections=True)
    assert len(rot) == count
    assert len(both) == 2 * count
    for a in both:
        sign = -1 if a.reflect else 1
        g = a.edges
        assert sorted(g) == list(range(T.num_edges))
        for i, j in itertools.product(range(T.num_edges), repeat=2):
            assert eps[g[i], g[j]] == sign * eps[i, j]
