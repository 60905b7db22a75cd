"""Z2 transition data on the nerve of a finite cover.

Vertices stand for open sets, edges for pairwise overlaps, triangles for
triple overlaps.  Sign labels on edges are encoded as GF(2) bits
(+1 -> 0, -1 -> 1); the cocycle condition, difference classes,
coboundary solving and the first-cohomology dimension are all plain
GF(2) linear algebra on that encoding.
"""

import itertools
from dataclasses import dataclass

import numpy as np


def _norm_edge(a, b):
    if a == b:
        raise ValueError(f"self-loop edge ({a}, {b})")
    return (a, b) if str(a) <= str(b) else (b, a)


def _norm_tri(a, b, c):
    t = tuple(sorted((a, b, c), key=str))
    if len(set(t)) != 3:
        raise ValueError(f"degenerate triangle {t}")
    return t


@dataclass(frozen=True)
class Nerve:
    """Combinatorial nerve: vertex ids, overlap edges, triple-overlap triangles."""

    vertices: tuple
    edges: tuple
    triangles: tuple = ()

    def __post_init__(self):
        verts = tuple(self.vertices)
        if len(set(verts)) != len(verts):
            raise ValueError("duplicate vertex ids")
        edges = tuple(_norm_edge(*e) for e in self.edges)
        if len(set(edges)) != len(edges):
            raise ValueError("duplicate edges")
        tris = tuple(_norm_tri(*t) for t in self.triangles)
        if len(set(tris)) != len(tris):
            raise ValueError("duplicate triangles")
        vset = set(verts)
        for e in edges:
            if not set(e) <= vset:
                raise ValueError(f"edge {e} references unknown vertex")
        eset = set(edges)
        for t in tris:
            for pair in itertools.combinations(t, 2):
                if _norm_edge(*pair) not in eset:
                    raise ValueError(f"triangle {t} missing edge {pair}")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "triangles", tris)

    def edge_index(self):
        return {e: i for i, e in enumerate(self.edges)}

    def vertex_index(self):
        return {v: i for i, v in enumerate(self.vertices)}

    def triangle_matrix(self):
        """GF(2) triangle-constraint matrix, shape (#triangles, #edges)."""
        T = np.zeros((len(self.triangles), len(self.edges)), dtype=np.uint8)
        eidx = self.edge_index()
        for row, (a, b, c) in enumerate(self.triangles):
            for pair in ((a, b), (b, c), (a, c)):
                T[row, eidx[_norm_edge(*pair)]] = 1
        return T

    def coboundary_matrix(self):
        """GF(2) vertex-to-edge map, shape (#edges, #vertices)."""
        D = np.zeros((len(self.edges), len(self.vertices)), dtype=np.uint8)
        vidx = self.vertex_index()
        for row, (a, b) in enumerate(self.edges):
            D[row, vidx[a]] = 1
            D[row, vidx[b]] = 1
        return D


@dataclass(frozen=True)
class Z2Cocycle:
    """Sign labels gamma_ab in {+1,-1} per unordered edge."""

    labels: dict

    def __post_init__(self):
        norm = {}
        for e, v in dict(self.labels).items():
            if v not in (+1, -1):
                raise ValueError(f"label for edge {e} must be +1 or -1, got {v}")
            norm[_norm_edge(*e)] = int(v)
        object.__setattr__(self, "labels", norm)

    def bits(self, nerve):
        out = np.zeros(len(nerve.edges), dtype=np.uint8)
        for i, e in enumerate(nerve.edges):
            if e not in self.labels:
                raise ValueError(f"missing label for edge {e}")
            out[i] = 0 if self.labels[e] == +1 else 1
        return out

    @staticmethod
    def from_bits(nerve, bits):
        return Z2Cocycle({e: (+1 if b == 0 else -1)
                          for e, b in zip(nerve.edges, bits)})


@dataclass(frozen=True)
class OverlapDeformation:
    """Per-vertex deformation value and a positive monotone functional tag."""

    phi: dict
    functional: str = "identity"

    _FUNCTIONALS = {
        "identity": lambda v: v,
        "square": lambda v: v * v,
    }

    def __post_init__(self):
        for v, val in self.phi.items():
            if not 0.0 < val <= 1.0:
                raise ValueError(f"phi[{v}]={val} outside (0,1]")
        if self.functional not in self._FUNCTIONALS:
            raise ValueError(f"unknown functional {self.functional!r}")

    def value(self, vertex):
        out = self._FUNCTIONALS[self.functional](self.phi[vertex])
        if out <= 0:
            raise ValueError(f"functional value non-positive at vertex {vertex}")
        return out


def gf2_rank(A):
    """Rank of a matrix over GF(2) by row elimination."""
    A = (np.asarray(A, dtype=np.uint8) & 1).copy()
    if A.size == 0:
        return 0
    rank = 0
    rows, cols = A.shape
    for c in range(cols):
        if rank >= rows:
            break
        pivots = np.nonzero(A[rank:, c])[0]
        if pivots.size == 0:
            continue
        p = rank + pivots[0]
        if p != rank:
            A[[rank, p]] = A[[p, rank]]
        hits = np.nonzero(A[:, c])[0]
        hits = hits[hits != rank]
        A[hits] ^= A[rank]
        rank += 1
    return rank


def gf2_solve(A, b):
    """One solution x of A x = b over GF(2), or None if inconsistent."""
    A = (np.asarray(A, dtype=np.uint8) & 1).copy()
    b = (np.asarray(b, dtype=np.uint8) & 1).copy()
    rows, cols = A.shape
    aug = np.concatenate([A, b[:, None]], axis=1)
    pivot_col = []
    rank = 0
    for c in range(cols):
        if rank >= rows:
            break
        pivots = np.nonzero(aug[rank:, c])[0]
        if pivots.size == 0:
            continue
        p = rank + pivots[0]
        if p != rank:
            aug[[rank, p]] = aug[[p, rank]]
        hits = np.nonzero(aug[:, c])[0]
        hits = hits[hits != rank]
        aug[hits] ^= aug[rank]
        pivot_col.append(c)
        rank += 1
    if np.any(aug[rank:, -1]):
        return None
    x = np.zeros(cols, dtype=np.uint8)
    for r, c in enumerate(pivot_col):
        x[c] = aug[r, -1]
    return x


def cocycle_check(cocycle, nerve):
    """(ok, violating_triangles): every triangle's edge product must be +1."""
    bits = cocycle.bits(nerve)
    bad = []
    eidx = nerve.edge_index()
    for tri in nerve.triangles:
        a, b, c = tri
        s = (bits[eidx[_norm_edge(a, b)]]
             ^ bits[eidx[_norm_edge(b, c)]]
             ^ bits[eidx[_norm_edge(a, c)]])
        if s:
            bad.append(tri)
    return len(bad) == 0, bad


def difference_class(cocycle, cocycle_prime, nerve):
    """Edgewise product of two cocycles (Z2 inverse is the identity)."""
    for name, c in (("first", cocycle), ("second", cocycle_prime)):
        ok, bad = cocycle_check(c, nerve)
        if not ok:
            raise ValueError(f"{name} input is not a cocycle; violations: {bad}")
    bits = cocycle.bits(nerve) ^ cocycle_prime.bits(nerve)
    out = Z2Cocycle.from_bits(nerve, bits)
    ok, bad = cocycle_check(out, nerve)
    if not ok:
        raise AssertionError(f"difference class failed the cocycle condition: {bad}")
    return out


def is_coboundary(cocycle, nerve):
    """Vertex labeling chi with delta_ab = chi(a) chi(b) if one exists, else None."""
    ok, bad = cocycle_check(cocycle, nerve)
    if not ok:
        raise ValueError(f"input is not a cocycle; violations: {bad}")
    x = gf2_solve(nerve.coboundary_matrix(), cocycle.bits(nerve))
    if x is None:
        return None
    return {v: (+1 if b == 0 else -1) for v, b in zip(nerve.vertices, x)}


def h1_dimension(nerve):
    """GF(2) dimension of cocycles modulo coboundaries.

    The number of inequivalent structures carried by the cover is
    2 ** h1_dimension.
    """
    n_edges = len(nerve.edges)
    rank_t = gf2_rank(nerve.triangle_matrix()) if nerve.triangles else 0
    rank_d = gf2_rank(nerve.coboundary_matrix()) if n_edges else 0
    return (n_edges - rank_t) - rank_d


def deformed_gluing_check(chi, defo, nerve, rel_tol=1e-12):
    """Edgewise obstruction to a global structure map under the deformation.

    An edge (a, b) is unobstructed iff F[phi_b] / F[phi_a] = 1; with any
    injective positive F this is phi_a = phi_b.  chi must label every
    vertex with +-1 (the candidate isomorphism data); it does not affect
    which edges obstruct.
    """
    for v in nerve.vertices:
        if chi.get(v) not in (+1, -1):
            raise ValueError(f"chi must assign +1 or -1 to every vertex; bad: {v}")
    obstructed = []
    for (a, b) in nerve.edges:
        ratio = defo.value(b) / defo.value(a)
        if abs(ratio - 1.0) > rel_tol:
            obstructed.append((a, b))
    return {"global_map_exists": not obstructed, "obstructed_edges": obstructed}


# --------------------------------------------------------------------------
# shipped nerves and text-file formats


def circle_nerve():
    """Three arcs covering a circle: pairwise overlaps, no triple overlap."""
    return Nerve(vertices=(0, 1, 2), edges=((0, 1), (1, 2), (0, 2)))


def torus_nerve():
    """Nerve of the cyclic seven-vertex minimal torus triangulation."""
    tris = []
    for i in range(7):
        tris.append((i, (i + 1) % 7, (i + 3) % 7))
        tris.append((i, (i + 2) % 7, (i + 3) % 7))
    edges = sorted({
        _norm_edge(*pair) for t in tris for pair in itertools.combinations(t, 2)
    })
    return Nerve(vertices=tuple(range(7)), edges=tuple(edges),
                 triangles=tuple(tris))


def parse_nerve(text):
    """Records: `v <id>`, `e <id> <id>`, `t <id> <id> <id>`, `#` comments."""
    verts, edges, tris = [], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag, args = parts[0], parts[1:]
        if tag == "v" and len(args) == 1:
            verts.append(args[0])
        elif tag == "e" and len(args) == 2:
            edges.append(tuple(args))
        elif tag == "t" and len(args) == 3:
            tris.append(tuple(args))
        else:
            raise ValueError(f"bad nerve record at line {lineno}: {raw!r}")
    return Nerve(vertices=tuple(verts), edges=tuple(edges), triangles=tuple(tris))


def parse_cocycle(text):
    """Records: `<id> <id> <+1|-1>` per edge."""
    labels = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3 or parts[2] not in ("+1", "-1", "1"):
            raise ValueError(f"bad cocycle record at line {lineno}: {raw!r}")
        labels[(parts[0], parts[1])] = +1 if parts[2] in ("+1", "1") else -1
    return Z2Cocycle(labels)


def parse_deformation(text, functional="identity"):
    """Records: `<vertex> <float>` per vertex."""
    phi = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"bad deformation record at line {lineno}: {raw!r}")
        phi[parts[0]] = float(parts[1])
    return OverlapDeformation(phi=phi, functional=functional)
