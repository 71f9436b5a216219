"""Built-in triangulations used by the demos and the test-suite.

Everything here is constructed from vertex triples; `_from_triangles` dedupes
edges by endpoint pair, so these builders cover exactly the meshes without
parallel edges.  `minimal_projective_plane` needs parallel edges and builds
its edge table by hand.
"""

from __future__ import annotations

import math

from .mesh import WeightedTriangulation

__all__ = [
    "face_id_of",
    "genus_2",
    "minimal_projective_plane",
    "octahedron",
    "replace_weights",
    "star_subdivide",
    "tetrahedron",
    "torus_7",
    "violating_genus_2",
    "violating_sphere",
]


def _from_triangles(vertex_count, triangles, weight=0.0, *, allow_duplicate_triples=False):
    edge_ids = {}
    edges = []

    def eid(a, b):
        key = frozenset((a, b))
        if key not in edge_ids:
            edge_ids[key] = len(edges)
            edges.append((min(a, b), max(a, b), weight))
        return edge_ids[key]

    faces = []
    for i, j, k in triangles:
        faces.append(((i, j, k), (eid(j, k), eid(k, i), eid(i, j))))
    return WeightedTriangulation(
        vertex_count, edges, faces, allow_duplicate_triples=allow_duplicate_triples
    )


def face_id_of(mesh: WeightedTriangulation, triple) -> int:
    want = frozenset(int(v) for v in triple)
    for f, face in enumerate(mesh.faces):
        if frozenset(face.vertices) == want:
            return f
    raise KeyError(f"no face on vertices {sorted(want)}")


def replace_weights(mesh: WeightedTriangulation, weights) -> WeightedTriangulation:
    """Same topology, new weights.

    `weights` is a scalar for all edges, a full per-edge sequence, or a dict
    keyed by edge id or endpoint pair (unkeyed edges keep their weight; a pair
    key sets every parallel edge on that pair).
    """
    old = [e.weight for e in mesh.edges]
    if isinstance(weights, dict):
        new = list(old)
        for key, w in weights.items():
            if isinstance(key, int):
                new[key] = float(w)
            else:
                pair = frozenset(int(v) for v in key)
                for idx in mesh.pair_edges()[pair]:
                    new[idx] = float(w)
    elif hasattr(weights, "__len__"):
        if len(weights) != mesh.edge_count:
            raise ValueError("need one weight per edge")
        new = [float(w) for w in weights]
    else:
        new = [float(weights)] * mesh.edge_count
    edges = [(e.a, e.b, w) for e, w in zip(mesh.edges, new)]
    faces = [(f.vertices, f.edges) for f in mesh.faces]
    return WeightedTriangulation(
        mesh.vertex_count, edges, faces, allow_duplicate_triples=mesh.allow_duplicate_triples
    )


def star_subdivide(mesh: WeightedTriangulation, face_id: int):
    """Split one face into three at a new center vertex.

    The three spoke edges get weight zero; every other cell keeps its id
    (faces after `face_id` shift down by one, new faces go at the end).
    Returns (mesh, center vertex id).
    """
    face = mesh.faces[face_id]
    i, j, k = face.vertices
    e_jk, e_ki, e_ij = face.edges
    c = mesh.vertex_count
    edges = [(e.a, e.b, e.weight) for e in mesh.edges]
    s_i = len(edges)
    edges.append((i, c, 0.0))
    s_j = len(edges)
    edges.append((j, c, 0.0))
    s_k = len(edges)
    edges.append((k, c, 0.0))
    faces = [(f.vertices, f.edges) for n, f in enumerate(mesh.faces) if n != face_id]
    faces.append(((i, j, c), (s_j, s_i, e_ij)))
    faces.append(((j, k, c), (s_k, s_j, e_jk)))
    faces.append(((k, i, c), (s_i, s_k, e_ki)))
    return (
        WeightedTriangulation(
            c + 1, edges, faces, allow_duplicate_triples=mesh.allow_duplicate_triples
        ),
        c,
    )


def tetrahedron(weight: float = 0.0) -> WeightedTriangulation:
    return _from_triangles(4, [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)], weight)


def octahedron(weight: float = 0.0) -> WeightedTriangulation:
    faces = [
        (0, 1, 2),
        (0, 2, 3),
        (0, 3, 4),
        (0, 4, 1),
        (5, 2, 1),
        (5, 3, 2),
        (5, 4, 3),
        (5, 1, 4),
    ]
    return _from_triangles(6, faces, weight)


def torus_7(weight: float = 0.0) -> WeightedTriangulation:
    """7-vertex torus on the complete graph: every vertex pair is an edge,
    faces {i, i+1, i+3} and {i, i+2, i+3} mod 7, all vertices of degree 6."""
    faces = []
    for i in range(7):
        faces.append((i, (i + 1) % 7, (i + 3) % 7))
        faces.append((i, (i + 2) % 7, (i + 3) % 7))
    return _from_triangles(7, faces, weight)


_GLUE_RELABEL = {0: 0, 1: 1, 2: 7, 3: 3, 4: 8, 5: 9, 6: 10}


def genus_2(weight: float = 0.0) -> WeightedTriangulation:
    """Two 7-vertex tori glued along a removed face.

    Both copies drop the face {0, 1, 3}; the second is relabeled to share
    exactly the vertices 0, 1, 3 and the three boundary edges.  11 vertices,
    39 edges, 26 faces, Euler characteristic -2.
    """
    base = []
    for i in range(7):
        base.append((i, (i + 1) % 7, (i + 3) % 7))
        base.append((i, (i + 2) % 7, (i + 3) % 7))
    hole = frozenset((0, 1, 3))
    kept = [t for t in base if frozenset(t) != hole]
    relabeled = [tuple(_GLUE_RELABEL[v] for v in t) for t in kept]
    return _from_triangles(11, kept + relabeled, weight)


def minimal_projective_plane(weight: float = 0.0) -> WeightedTriangulation:
    """Antipodal quotient of the octahedron: 3 vertices, 6 edges (each vertex
    pair doubled), 4 faces all on the same triple.  Needs the generalized
    duplicate-triple mode; every 2-edge loop here is essential."""
    edges = [
        (0, 1, weight),
        (0, 1, weight),
        (1, 2, weight),
        (1, 2, weight),
        (0, 2, weight),
        (0, 2, weight),
    ]
    faces = [
        ((0, 1, 2), (2, 4, 0)),
        ((0, 1, 2), (2, 5, 1)),
        ((0, 1, 2), (3, 4, 1)),
        ((0, 1, 2), (3, 5, 0)),
    ]
    return WeightedTriangulation(3, edges, faces, allow_duplicate_triples=True)


def violating_sphere() -> WeightedTriangulation:
    """9-vertex sphere that fails the subset test at the singleton {6}.

    Star-subdividing three octahedron faces and keeping weight pi/2 on the
    rim of the first puts the bound for the first center at pi/2, above its
    curvature target 4*pi/9.
    """
    mesh = octahedron()
    mesh, _ = star_subdivide(mesh, face_id_of(mesh, (0, 1, 2)))
    mesh, _ = star_subdivide(mesh, face_id_of(mesh, (0, 3, 4)))
    mesh, _ = star_subdivide(mesh, face_id_of(mesh, (5, 1, 4)))
    half_pi = math.pi / 2.0
    return replace_weights(mesh, {(0, 1): half_pi, (1, 2): half_pi, (0, 2): half_pi})


def violating_genus_2() -> WeightedTriangulation:
    """Genus-2 mesh failing the 3-loop condition.

    Star-subdividing the face {2, 3, 5} and raising its rim weights to pi/2
    makes the rim a null-homotopic 3-loop of weight 3*pi/2 that no longer
    bounds a face.
    """
    mesh, _ = star_subdivide(genus_2(), face_id_of(genus_2(), (2, 3, 5)))
    half_pi = math.pi / 2.0
    return replace_weights(mesh, {(2, 3): half_pi, (3, 5): half_pi, (2, 5): half_pi})
