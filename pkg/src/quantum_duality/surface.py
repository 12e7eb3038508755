"""Ideal triangulations of punctured surfaces and their split versions.

Conventions
-----------
Edges are numbered 1..n in files and user-facing APIs and 0..n-1 internally.
Each triangle lists its three sides in clockwise order. Side slot ``k`` runs
clockwise from corner ``k-1`` to corner ``k``, where corner ``k`` is the
vertex shared by side slots ``k`` and ``k+1`` (indices mod 3). Standing on
side ``k`` and facing into the triangle, side ``k+1`` is on the left and
side ``k+2`` on the right.

The two occurrences of an edge are glued orientation-reversingly, which is
the only gluing compatible with an orientation, so the side lists determine
the surface. Punctures are given per corner and are checked against the
gluing.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Sequence

from .errors import InvalidTriangulation
from .qtorus import EpsilonForm

Side = tuple[int, int]  # (triangle, slot)


@dataclass(frozen=True)
class IdealTriangulation:
    """A validated ideal triangulation without self-folded triangles."""

    num_edges: int
    triangles: tuple[tuple[int, int, int], ...]  # 0-based edge ids, clockwise
    corners: tuple[tuple[object, object, object], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        tris = tuple(tuple(int(e) for e in t) for t in self.triangles)
        object.__setattr__(self, "triangles", tris)
        object.__setattr__(self, "corners", tuple(tuple(c) for c in self.corners))
        self._validate()

    def __hash__(self):
        # used as a cache key on hot paths
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.num_edges, self.triangles, self.corners))
            object.__setattr__(self, "_hash", h)
        return h

    # construction
    @classmethod
    def from_dict(cls, data: dict, name: str = "") -> IdealTriangulation:
        try:
            n = int(data["edges"])
            tris = [[int(e) - 1 for e in t] for t in data["triangles"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidTriangulation(f"malformed triangulation data: {exc}") from exc
        corners = data.get("corners")
        if corners is None:
            corners = _infer_corners(n, tris)
        return cls(n, tuple(map(tuple, tris)), tuple(map(tuple, corners)), name or data.get("name", ""))

    @classmethod
    def load(cls, path: str | Path) -> IdealTriangulation:
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise InvalidTriangulation(f"{path}: not valid JSON ({exc})") from exc
        return cls.from_dict(data, name=path.stem)

    def to_dict(self) -> dict:
        return {
            "edges": self.num_edges,
            "triangles": [[e + 1 for e in t] for t in self.triangles],
            "corners": [list(c) for c in self.corners],
        }

    # validation
    def _validate(self):
        n = self.num_edges
        if n < 1:
            raise InvalidTriangulation("need at least one edge")
        if len(self.corners) != len(self.triangles):
            raise InvalidTriangulation("corner list must have one entry per triangle")
        seen: dict[int, list[Side]] = {}
        for t, tri in enumerate(self.triangles):
            if len(tri) != 3:
                raise InvalidTriangulation(f"triangle {t + 1} does not have three sides")
            if len(self.corners[t]) != 3:
                raise InvalidTriangulation(f"triangle {t + 1} does not have three corners")
            if len(set(tri)) != 3:
                raise InvalidTriangulation(
                    f"triangle {t + 1} uses an edge twice (self-folded triangles are not supported)")
            for k, e in enumerate(tri):
                if not 0 <= e < n:
                    raise InvalidTriangulation(f"triangle {t + 1} names edge {e + 1} outside 1..{n}")
                seen.setdefault(e, []).append((t, k))
        for e in range(n):
            if len(seen.get(e, [])) != 2:
                raise InvalidTriangulation(
                    f"edge {e + 1} appears {len(seen.get(e, []))} times; every edge must bound two sides")
        # vertex classes from the gluing must match the corner labels
        uf = _UnionFind(3 * len(self.triangles))
        for (t, a), (u, b) in (seen[e] for e in range(n)):
            uf.union(3 * t + (a - 1) % 3, 3 * u + b)
            uf.union(3 * t + a, 3 * u + (b - 1) % 3)
        label_of_class: dict[int, object] = {}
        class_of_label: dict[object, int] = {}
        for t in range(len(self.triangles)):
            for c in range(3):
                root = uf.find(3 * t + c)
                lab = self.corners[t][c]
                if label_of_class.setdefault(root, lab) != lab or class_of_label.setdefault(lab, root) != root:
                    raise InvalidTriangulation(
                        f"corner {c} of triangle {t + 1} is labelled {lab!r}, inconsistent with the gluing")
        v = len(label_of_class)
        chi = v - n + len(self.triangles)
        if chi > 2 or chi % 2:
            raise InvalidTriangulation(f"Euler characteristic {chi} is not that of a closed orientable surface")
        if 3 * len(self.triangles) != 2 * n:
            raise InvalidTriangulation("3 * triangles must equal 2 * edges")

    # structure
    @property
    def n(self) -> int:
        return self.num_edges

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    @cached_property
    def edge_sides(self) -> tuple[tuple[Side, Side], ...]:
        """For each edge, (side A, side B): its two occurrences in triangle order."""
        seen: dict[int, list[Side]] = {}
        for t, tri in enumerate(self.triangles):
            for k, e in enumerate(tri):
                seen.setdefault(e, []).append((t, k))
        return tuple((seen[e][0], seen[e][1]) for e in range(self.num_edges))

    @cached_property
    def punctures(self) -> tuple[object, ...]:
        out = []
        for c in self.corners:
            for lab in c:
                if lab not in out:
                    out.append(lab)
        return tuple(sorted(out, key=lambda x: (str(type(x)), x)))

    @property
    def genus(self) -> int:
        chi = len(self.punctures) - self.num_edges + self.num_triangles
        return (2 - chi) // 2

    def edge(self, t: int, k: int) -> int:
        return self.triangles[t][k % 3]

    def other_side(self, t: int, k: int) -> Side:
        a, b = self.edge_sides[self.triangles[t][k]]
        return b if a == (t, k) else a

    def side_endpoints(self, t: int, k: int) -> tuple[object, object]:
        """Puncture labels at the clockwise start and end of side slot k."""
        return self.corners[t][(k - 1) % 3], self.corners[t][k % 3]

    def edge_ends(self, e: int) -> tuple[object, object]:
        (t, a), _ = self.edge_sides[e]
        return self.side_endpoints(t, a)

    def epsilon_matrix(self) -> EpsilonForm:
        return epsilon_matrix(self)

    def split(self) -> SplitTriangulation:
        return split(self)

    def peripheral_vector(self, puncture) -> tuple[Fraction, ...]:
        return peripheral_vector(self, puncture)

    def peripheral_mu(self, puncture) -> tuple[int, ...]:
        """Doubled coordinates of the loop around ``puncture``."""
        if puncture not in self.punctures:
            raise ValueError(f"unknown puncture {puncture!r}")
        return tuple(sum(1 for x in self.edge_ends(e) if x == puncture) for e in range(self.num_edges))


def epsilon_matrix(T: IdealTriangulation) -> EpsilonForm:
    """e_ij = (#corners where side i is followed clockwise by side j) minus the reverse."""
    n = T.num_edges
    m = [[0] * n for _ in range(n)]
    for tri in T.triangles:
        for k in range(3):
            i, j = tri[k], tri[(k + 1) % 3]
            m[i][j] += 1
            m[j][i] -= 1
    return EpsilonForm(tuple(map(tuple, m)))


def peripheral_vector(T: IdealTriangulation, puncture) -> tuple[Fraction, ...]:
    return tuple(Fraction(x, 2) for x in T.peripheral_mu(puncture))


@dataclass(frozen=True)
class Automorphism:
    """Combinatorial relabelling of a triangulation onto itself.

    Triangle t goes to ``triangles[t]`` with slot k landing on slot
    ``k + rotations[t]``, or on slot ``rotations[t] - k`` when ``reflect``
    is set (the orientation-reversing case); edge e goes to ``edges[e]``.
    """

    triangles: tuple[int, ...]
    rotations: tuple[int, ...]
    edges: tuple[int, ...]
    reflect: bool = False

    def slot(self, t: int, k: int) -> int:
        r = self.rotations[t]
        return (r - k) % 3 if self.reflect else (k + r) % 3

    def corner(self, t: int, c: int) -> int:
        r = self.rotations[t]
        return (r - c - 1) % 3 if self.reflect else (c + r) % 3

    def map_corner_counts(self, m: Sequence[Sequence[int]]) -> tuple[tuple[int, int, int], ...]:
        out = [[0, 0, 0] for _ in m]
        for t, row in enumerate(m):
            for c, v in enumerate(row):
                out[self.triangles[t]][self.corner(t, c)] = v
        return tuple(map(tuple, out))

    def map_exponents(self, p: Sequence[int]) -> tuple[int, ...]:
        out = [0] * len(p)
        for e, v in enumerate(p):
            out[self.edges[e]] = v
        return tuple(out)


def automorphisms(T: IdealTriangulation, reflections: bool = False) -> tuple[Automorphism, ...]:
    """Orientation-preserving combinatorial automorphisms, identity first.

    With ``reflections`` the orientation-reversing ones follow.
    """
    out = _automorphisms(T, False)
    return out + _automorphisms(T, True) if reflections else out


_AUTO_CACHE: dict = {}


def _automorphisms(T: IdealTriangulation, reflect: bool) -> tuple[Automorphism, ...]:
    key = (T.num_edges, T.triangles, reflect)
    if key in _AUTO_CACHE:
        return _AUTO_CACHE[key]
    F = T.num_triangles
    found = []
    for t0 in range(F):
        for r0 in range(3):
            tri = [None] * F
            rot = [None] * F
            edge = [None] * T.num_edges
            tri[0], rot[0] = t0, r0
            stack, ok = [0], True
            while stack and ok:
                t = stack.pop()
                for k in range(3):
                    e = T.triangles[t][k]
                    img_side = (tri[t], (rot[t] - k) % 3 if reflect else (k + rot[t]) % 3)
                    fe = T.triangles[img_side[0]][img_side[1]]
                    if edge[e] is None:
                        edge[e] = fe
                    elif edge[e] != fe:
                        ok = False
                        break
                    u, j = T.other_side(t, k)
                    v, i = T.other_side(*img_side)
                    ru = (i + j) % 3 if reflect else (i - j) % 3
                    if tri[u] is None:
                        tri[u], rot[u] = v, ru
                        stack.append(u)
                    elif (tri[u], rot[u]) != (v, ru):
                        ok = False
                        break
            if ok and None not in tri and sorted(tri) == list(range(F)) and sorted(edge) == list(range(T.num_edges)):
                found.append(Automorphism(tuple(tri), tuple(rot), tuple(edge), reflect))
    found.sort(key=lambda a: (a.triangles != tuple(range(F)) or any(a.rotations), a.triangles, a.rotations))
    _AUTO_CACHE[key] = tuple(found)
    return _AUTO_CACHE[key]


@dataclass(frozen=True)
class Biangle:
    """The thin region that replaces edge ``edge`` in the split triangulation.

    Both sides are oriented along the edge direction, i.e. clockwise along
    side A of the edge. Looking along that direction, the triangle of side A
    is on the right and the triangle of side B on the left.
    """

    edge: int
    right: Side
    left: Side


@dataclass(frozen=True)
class SplitTriangulation:
    triangulation: IdealTriangulation
    biangles: tuple[Biangle, ...]

    @property
    def n(self) -> int:
        return self.triangulation.num_edges


def split(T: IdealTriangulation) -> SplitTriangulation:
    return SplitTriangulation(T, tuple(Biangle(e, a, b) for e, (a, b) in enumerate(T.edge_sides)))


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _infer_corners(n: int, tris: Sequence[Sequence[int]]) -> list[list[int]]:
    seen: dict[int, list[Side]] = {}
    for t, tri in enumerate(tris):
        if len(set(tri)) != len(tri):
            raise InvalidTriangulation(
                f"triangle {t + 1} uses an edge twice (self-folded triangles are not supported)")
        for k, e in enumerate(tri):
            seen.setdefault(e, []).append((t, k))
    uf = _UnionFind(3 * len(tris))
    for e, occ in seen.items():
        if len(occ) != 2:
            raise InvalidTriangulation(f"edge {e + 1} appears {len(occ)} times")
        (t, a), (u, b) = occ
        uf.union(3 * t + (a - 1) % 3, 3 * u + b)
        uf.union(3 * t + a, 3 * u + (b - 1) % 3)
    labels: dict[int, int] = {}
    out = []
    for t in range(len(tris)):
        row = []
        for c in range(3):
            r = uf.find(3 * t + c)
            row.append(labels.setdefault(r, len(labels) + 1))
        out.append(row)
    return out


BUILTIN = ("punctured_torus", "sphere_4")


def builtin(name: str) -> IdealTriangulation:
    """Load one of the bundled triangulations by name."""
    if name not in BUILTIN:
        raise ValueError(f"unknown built-in surface {name!r}; choose from {', '.join(BUILTIN)}")
    text = resources.files("quantum_duality").joinpath("data", f"{name}.json").read_text()
    return IdealTriangulation.from_dict(json.loads(text), name=name)


def load_surface(spec: str) -> IdealTriangulation:
    """A path to a JSON file, or a bundled name (with or without ``.json``).

    An existing file wins over a bundled file of the same name.
    """
    if spec in BUILTIN:
        return builtin(spec)
    path = Path(spec)
    if not path.exists() and path.suffix == ".json" and path.stem in BUILTIN and path.name == spec:
        return builtin(path.stem)
    return IdealTriangulation.load(spec)
