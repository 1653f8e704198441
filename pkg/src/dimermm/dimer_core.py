"""Dimer models on the torus as combinatorial maps, face tracing and the dual QP.

A dimer model is stored purely combinatorially: vertices with colours, edges
with a white and a black endpoint and an integer displacement ``(dx, dy)`` for
the white-to-black orientation, and for every vertex the counterclockwise
cyclic order of its incident edges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

BLACK = "black"
WHITE = "white"

Vec = Tuple[int, int]
Dart = Tuple[str, str]  # (vertex-id, edge-id): leave the vertex along the edge
Cycle = Tuple[str, ...]


class DimerError(ValueError):
    """Raised for malformed dimers or quivers that are not dimer duals."""


@dataclass(frozen=True)
class Edge:
    id: str
    white: str
    black: str
    dx: int = 0
    dy: int = 0

    @property
    def d(self) -> Vec:
        return (self.dx, self.dy)


@dataclass(frozen=True)
class DimerModel:
    vertices: Tuple[Tuple[str, str], ...]
    edges: Tuple[Edge, ...]
    rotations: Tuple[Tuple[str, Tuple[str, ...]], ...]
    # optional naming of faces: label -> dart whose left side is the face
    face_labels: Tuple[Tuple[str, Dart], ...] = ()
    base_matching: Optional[Tuple[str, ...]] = None
    comment: str = field(default="", compare=False)
    type: Optional[str] = field(default=None, compare=False)

    @staticmethod
    def build(vertices: Iterable[Tuple[str, str]], edges: Iterable[Edge],
              rotations: Mapping[str, Sequence[str]], face_labels: Optional[Mapping[str, Dart]] = None,
              base_matching: Optional[Iterable[str]] = None, comment: str = "",
              type: Optional[str] = None) -> "DimerModel":
        return DimerModel(
            vertices=tuple(sorted((v, c) for v, c in vertices)),
            edges=tuple(sorted(edges, key=lambda e: e.id)),
            rotations=tuple(sorted((v, tuple(r)) for v, r in rotations.items())),
            face_labels=tuple(sorted((k, tuple(v)) for k, v in (face_labels or {}).items())),
            base_matching=None if base_matching is None else tuple(sorted(base_matching)),
            comment=comment,
            type=type,
        )

    @cached_property
    def color(self) -> Dict[str, str]:
        return dict(self.vertices)

    @cached_property
    def edge(self) -> Dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def rotation(self) -> Dict[str, Tuple[str, ...]]:
        return dict(self.rotations)

    @cached_property
    def _rot_index(self) -> Dict[Dart, int]:
        return {(v, e): i for v, r in self.rotations for i, e in enumerate(r)}

    def other_end(self, v: str, e: str) -> str:
        ed = self.edge[e]
        return ed.black if v == ed.white else ed.white

    def next_dart(self, dart: Dart) -> Dart:
        """Next dart along the face on the left of ``dart``."""
        v, e = dart
        u = self.other_end(v, e)
        r = self.rotation[u]
        i = self._rot_index[(u, e)]
        return (u, r[(i - 1) % len(r)])

    def with_displacements(self, disp: Mapping[str, Vec]) -> "DimerModel":
        edges = [Edge(e.id, e.white, e.black, disp[e.id][0], disp[e.id][1]) for e in self.edges]
        return DimerModel(self.vertices, tuple(edges), self.rotations, self.face_labels,
                          self.base_matching, self.comment, self.type)


@dataclass(frozen=True)
class Face:
    """A face of the dimer (a vertex of the dual quiver).

    ``boundary`` lists (edge-id, sign) in counterclockwise order, sign +1 when
    the edge is traversed white to black.
    """
    id: str
    darts: Tuple[Dart, ...]
    boundary: Tuple[Tuple[str, int], ...]


@dataclass
class ValidationReport:
    problems: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def __bool__(self) -> bool:
        return self.ok


def _trace_raw(d: DimerModel) -> List[Tuple[Dart, ...]]:
    seen = set()
    out = []
    for v, r in d.rotations:
        for e in r:
            if (v, e) in seen:
                continue
            cyc = []
            cur = (v, e)
            while cur not in seen:
                seen.add(cur)
                cyc.append(cur)
                cur = d.next_dart(cur)
            if cur != (v, e):
                raise DimerError("face tracing did not close at %s" % (cur,))
            out.append(tuple(cyc))
    return out


def _check_rotation_system(d: DimerModel) -> List[str]:
    probs = []
    ids = [v for v, _ in d.vertices]
    if len(set(ids)) != len(ids):
        probs.append("duplicate vertex ids")
    for v, c in d.vertices:
        if c not in (BLACK, WHITE):
            probs.append("vertex %s has colour %r" % (v, c))
    eids = [e.id for e in d.edges]
    if len(set(eids)) != len(eids):
        probs.append("duplicate edge ids")
    inc: Dict[str, List[str]] = {v: [] for v in ids}
    for e in d.edges:
        if e.white not in d.color or e.black not in d.color:
            probs.append("edge %s has an unknown endpoint" % e.id)
            continue
        if d.color[e.white] != WHITE or d.color[e.black] != BLACK:
            probs.append("edge %s does not join a white vertex to a black vertex" % e.id)
        inc[e.white].append(e.id)
        inc[e.black].append(e.id)
    rot = d.rotation
    for v in ids:
        if v not in rot:
            probs.append("vertex %s has no rotation" % v)
        elif sorted(rot[v]) != sorted(inc[v]):
            probs.append("rotation at %s does not list exactly its incident edges" % v)
    for v in rot:
        if v not in d.color:
            probs.append("rotation given for unknown vertex %s" % v)
    return probs


def _wraps_torus(d: DimerModel) -> bool:
    """Whether the displacements of closed walks span the whole lattice Z^2."""
    pos: Dict[str, Vec] = {}
    gens: List[Vec] = []
    start = d.vertices[0][0]
    pos[start] = (0, 0)
    stack = [start]
    inc: Dict[str, List[Tuple[str, int, int]]] = {v: [] for v, _ in d.vertices}
    for e in d.edges:
        inc[e.white].append((e.black, e.dx, e.dy))
        inc[e.black].append((e.white, -e.dx, -e.dy))
    while stack:
        v = stack.pop()
        for u, dx, dy in inc[v]:
            p = (pos[v][0] + dx, pos[v][1] + dy)
            if u not in pos:
                pos[u] = p
                stack.append(u)
            elif p != pos[u]:
                gens.append((p[0] - pos[u][0], p[1] - pos[u][1]))
    g = 0
    for a in gens:
        for b in gens:
            g = math.gcd(g, a[0] * b[1] - a[1] * b[0])
    return g == 1


def validate(d: DimerModel) -> ValidationReport:
    """Check every structural invariant; violations are reported, not raised."""
    rep = ValidationReport(_check_rotation_system(d))
    if rep.problems:
        return rep
    # connectivity
    adj: Dict[str, set] = {v: set() for v, _ in d.vertices}
    for e in d.edges:
        adj[e.white].add(e.black)
        adj[e.black].add(e.white)
    if adj:
        start = next(iter(adj))
        seen = {start}
        stack = [start]
        while stack:
            for u in adj[stack.pop()]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        if len(seen) != len(adj):
            rep.problems.append("graph is not connected")
        elif not _wraps_torus(d):
            rep.problems.append("cycle displacements do not generate Z^2")
    for v, r in d.rotations:
        if len(r) == 2:
            rep.problems.append("vertex %s is bivalent" % v)
    faces = _trace_raw(d)
    V, E, F = len(d.vertices), len(d.edges), len(faces)
    if V - E + F != 0:
        rep.problems.append("Euler characteristic V-E+F = %d-%d+%d = %d, expected 0" % (V, E, F, V - E + F))
    for cyc in faces:
        sx = sy = 0
        for v, e in cyc:
            ed = d.edge[e]
            s = 1 if v == ed.white else -1
            sx += s * ed.dx
            sy += s * ed.dy
        if (sx, sy) != (0, 0):
            rep.problems.append("face through %s has displacement sum (%d, %d)" % (cyc[0], sx, sy))
        cols = [d.color[v] for v, _ in cyc]
        if any(cols[i] == cols[(i + 1) % len(cols)] for i in range(len(cols))):
            rep.problems.append("face through %s does not alternate colours" % (cyc[0],))
        if len(cyc) < 2:
            rep.problems.append("degenerate face through %s" % (cyc[0],))
    if d.face_labels:
        dart_face = {dt: i for i, cyc in enumerate(faces) for dt in cyc}
        hit = []
        for lab, dt in d.face_labels:
            if dt not in dart_face:
                rep.problems.append("face label %s refers to unknown dart %s" % (lab, dt))
            else:
                hit.append(dart_face[dt])
        if len(hit) == len(d.face_labels) and (len(set(hit)) != len(hit) or len(hit) != F):
            rep.problems.append("face labels do not name every face exactly once")
    return rep


def trace_faces(d: DimerModel) -> List[Face]:
    """Faces of ``d`` with their counterclockwise boundaries.

    Faces carry the labels stored in the dimer when present, otherwise
    ``f0, f1, ...`` in order of their smallest dart.
    """
    probs = _check_rotation_system(d)
    if probs:
        raise DimerError("malformed rotation system: " + "; ".join(probs))
    raw = _trace_raw(d)
    labels = {}
    if d.face_labels:
        dart_face = {dt: i for i, cyc in enumerate(raw) for dt in cyc}
        for lab, dt in d.face_labels:
            labels[dart_face[tuple(dt)]] = lab
        if len(labels) != len(raw):
            raise DimerError("face labels do not cover every face")
    order = sorted(range(len(raw)), key=lambda i: min(raw[i]))
    faces = []
    for n, i in enumerate(order):
        cyc = raw[i]
        bd = tuple((e, 1 if v == d.edge[e].white else -1) for v, e in cyc)
        faces.append(Face(labels.get(i, "f%d" % n), cyc, bd))
    return sorted(faces, key=lambda f: _vertex_key(f.id))


def _vertex_key(s: str):
    return (0, int(s), "") if s.isdigit() else (1, 0, s)


# ---------------------------------------------------------------- quivers


@dataclass(frozen=True)
class Arrow:
    id: str
    tail: str
    head: str
    # displacement of the dual dimer edge (white to black), when known
    disp: Optional[Vec] = None


def canonical_cycle(seq: Sequence[str]) -> Cycle:
    """Lexicographically minimal rotation of an arrow sequence."""
    seq = tuple(seq)
    if not seq:
        return seq
    return min(seq[i:] + seq[:i] for i in range(len(seq)))


@dataclass(frozen=True)
class QuiverWithPotential:
    vertices: Tuple[str, ...]
    arrows: Tuple[Arrow, ...]
    potential: Tuple[Tuple[Cycle, int], ...]

    @staticmethod
    def build(vertices: Iterable[str], arrows: Iterable[Arrow], potential: Mapping[Sequence[str], int]) -> "QuiverWithPotential":
        pot: Dict[Cycle, int] = {}
        for cyc, c in potential.items():
            key = canonical_cycle(cyc)
            pot[key] = pot.get(key, 0) + c
        return QuiverWithPotential(
            tuple(sorted(set(vertices), key=_vertex_key)),
            tuple(sorted(arrows, key=lambda a: a.id)),
            tuple(sorted((k, c) for k, c in pot.items() if c != 0)),
        )

    @cached_property
    def arrow(self) -> Dict[str, Arrow]:
        return {a.id: a for a in self.arrows}

    @cached_property
    def W(self) -> Dict[Cycle, int]:
        return dict(self.potential)

    def out_arrows(self, v: str) -> List[Arrow]:
        return [a for a in self.arrows if a.tail == v]

    def in_arrows(self, v: str) -> List[Arrow]:
        return [a for a in self.arrows if a.head == v]

    def is_cycle(self, cyc: Sequence[str]) -> bool:
        n = len(cyc)
        return n > 0 and all(self.arrow[cyc[i]].head == self.arrow[cyc[(i + 1) % n]].tail for i in range(n))

    def format_potential(self) -> List[str]:
        return ["%+d\t%s" % (c, " ".join(cyc)) for cyc, c in self.potential]


def dual_qp(d: DimerModel) -> QuiverWithPotential:
    """The quiver with potential dual to ``d``.

    The arrow dual to an edge crosses it with the white endpoint on its right.
    Small cycles around white vertices run clockwise and enter W with +1,
    those around black vertices run counterclockwise and enter with -1.
    """
    rep = validate(d)
    if not rep.ok:
        raise DimerError("invalid dimer: " + "; ".join(rep.problems))
    faces = trace_faces(d)
    left = {dt: f.id for f in faces for dt in f.darts}
    arrows = []
    for e in d.edges:
        arrows.append(Arrow(e.id, left[(e.white, e.id)], left[(e.black, e.id)], e.d))
    pot: Dict[Cycle, int] = {}
    for v, r in d.rotations:
        if d.color[v] == WHITE:
            pot[canonical_cycle(tuple(reversed(r)))] = 1
        else:
            pot[canonical_cycle(r)] = -1
    return QuiverWithPotential.build([f.id for f in faces], arrows, pot)


def dimer_from_qp(q: QuiverWithPotential) -> DimerModel:
    """Rebuild the dimer whose dual is ``q`` (white vertices = +1 cycles)."""
    plus: Dict[str, Cycle] = {}
    minus: Dict[str, Cycle] = {}
    for cyc, c in q.potential:
        if not q.is_cycle(cyc):
            raise DimerError("potential term %s is not a cycle" % (cyc,))
        if c not in (1, -1):
            raise DimerError("coefficient %d is not +-1" % c)
        if len(set(cyc)) != len(cyc):
            raise DimerError("cycle %s repeats an arrow" % (cyc,))
        for a in cyc:
            side = plus if c == 1 else minus
            if a in side:
                raise DimerError("arrow %s lies in two %s cycles" % (a, "+1" if c == 1 else "-1"))
            side[a] = cyc
    for a in q.arrows:
        if a.id not in plus or a.id not in minus:
            raise DimerError("arrow %s is not in exactly one +1 and one -1 cycle" % a.id)
    wcycles = sorted({plus[a] for a in plus})
    bcycles = sorted({minus[a] for a in minus})
    wid = {c: "W%d" % (i + 1) for i, c in enumerate(wcycles)}
    bid = {c: "B%d" % (i + 1) for i, c in enumerate(bcycles)}
    verts = [(wid[c], WHITE) for c in wcycles] + [(bid[c], BLACK) for c in bcycles]
    edges = []
    for a in q.arrows:
        dx, dy = a.disp if a.disp is not None else (0, 0)
        edges.append(Edge(a.id, wid[plus[a.id]], bid[minus[a.id]], dx, dy))
    rot = {}
    for c in wcycles:
        rot[wid[c]] = tuple(reversed(c))
    for c in bcycles:
        rot[bid[c]] = tuple(c)
    labels = {}
    for a in q.arrows:
        labels.setdefault(a.tail, (wid[plus[a.id]], a.id))
    d = DimerModel.build(verts, edges, rot, labels)
    probs = [p for p in validate(d).problems if "displacement" not in p or all(a.disp is not None for a in q.arrows)]
    if probs:
        raise DimerError("quiver is not dimer dual: " + "; ".join(probs))
    return d


def apply_basis_change(d: DimerModel, g: Sequence[Sequence[int]]) -> DimerModel:
    """Replace each displacement v by g v (g an integer matrix, det +-1)."""
    (a, b), (c, e) = g
    if abs(a * e - b * c) != 1:
        raise DimerError("basis change must have determinant +-1")
    return d.with_displacements({x.id: (a * x.dx + b * x.dy, c * x.dx + e * x.dy) for x in d.edges})


def opposite(d: DimerModel) -> DimerModel:
    """Swap colours and negate displacements; the dual quiver becomes Q^op."""
    flip = {WHITE: BLACK, BLACK: WHITE}
    verts = [(v, flip[c]) for v, c in d.vertices]
    edges = [Edge(e.id, e.black, e.white, -e.dx, -e.dy) for e in d.edges]
    # faces are traced from the rotations alone, so their labels carry over
    labels = dict(d.face_labels)
    return DimerModel.build(verts, edges, dict(d.rotations), labels, d.base_matching, d.comment, d.type)
