"""Splitting generators of a polygon type and their exchange graph."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .classgroup import GroupPresentation, basis_class, subgroup_is_everything
from .dimer_core import DimerModel, QuiverWithPotential, apply_basis_change, dual_qp, opposite
from .matchings import extremals_in_order, pm_polygon
from .mm_generators import SplittingModule, dual_generator, generator, mutate_generator, twist
from .qp_mutation import mutable_vertices

Vec = Tuple[int, int]
Affine = Tuple[Tuple[Tuple[int, int], Tuple[int, int]], Vec]


class ExchangeError(ValueError):
    pass


def unimodular_maps(src: Sequence[Vec], dst: Sequence[Vec]) -> List[Affine]:
    """Affine maps x -> g x + t with g in GL(2, Z) carrying the cyclic polygon src onto dst.

    Both polygons list their vertices in cyclic order; every rotation and both
    orientations of the correspondence are tried.
    """
    n = len(src)
    if n != len(dst) or n < 3:
        return []
    out = []
    for orient in (1, -1):
        for s in range(n):
            img = [dst[(s + orient * j) % n] for j in range(n)]
            u1 = (src[1][0] - src[0][0], src[1][1] - src[0][1])
            u2 = (src[2][0] - src[0][0], src[2][1] - src[0][1])
            w1 = (img[1][0] - img[0][0], img[1][1] - img[0][1])
            w2 = (img[2][0] - img[0][0], img[2][1] - img[0][1])
            det = u1[0] * u2[1] - u1[1] * u2[0]
            if det == 0:
                continue
            # g = W U^{-1}, U = [u1 u2] as columns
            inv = ((Fraction(u2[1], det), Fraction(-u2[0], det)), (Fraction(-u1[1], det), Fraction(u1[0], det)))
            g = [[w1[r] * inv[0][c] + w2[r] * inv[1][c] for c in range(2)] for r in range(2)]
            if any(x.denominator != 1 for row in g for x in row):
                continue
            g = ((int(g[0][0]), int(g[0][1])), (int(g[1][0]), int(g[1][1])))
            if abs(g[0][0] * g[1][1] - g[0][1] * g[1][0]) != 1:
                continue
            t = (img[0][0] - g[0][0] * src[0][0] - g[0][1] * src[0][1],
                 img[0][1] - g[1][0] * src[0][0] - g[1][1] * src[0][1])
            ok = all((g[0][0] * p[0] + g[0][1] * p[1] + t[0], g[1][0] * p[0] + g[1][1] * p[1] + t[1]) == img[j]
                     for j, p in enumerate(src))
            if ok and (g, t) not in out:
                out.append((g, t))
    return out


def _ccw(vs: Sequence[Vec]) -> bool:
    area = sum(vs[i][0] * vs[(i + 1) % len(vs)][1] - vs[(i + 1) % len(vs)][0] * vs[i][1] for i in range(len(vs)))
    return area > 0


@dataclass(frozen=True)
class Presentation:
    """A generator together with the quiver whose vertices index its summands."""
    generator: SplittingModule
    quiver: QuiverWithPotential


def presentations(delta: Sequence[Vec], corpus: Sequence[Tuple[str, DimerModel]],
                  cl: GroupPresentation) -> List[Presentation]:
    """Generators of every corpus dimer at every vertex under every lattice symmetry onto delta.

    Duals are included; a dual lives on the opposite quiver. Tags:
    ``e{i}{X}`` for the presentation as given, ``e{i}{X}@g{m}`` for the m-th
    other symmetry, ``(tag)*`` for duals.
    """
    delta = [tuple(v) for v in delta]
    if not _ccw(delta):
        raise ExchangeError("target polygon must be listed counterclockwise")
    out: List[Presentation] = []
    for letter, d in corpus:
        poly = pm_polygon(d)
        maps = unimodular_maps(list(poly.hull), delta)
        if not maps:
            raise ExchangeError("matching polygon of %s is not equivalent to the target" % letter)
        ident = [m for m in maps if m[0] == ((1, 0), (0, 1))]
        maps = ident + [m for m in maps if m not in ident]
        q = dual_qp(d)
        qop = dual_qp(opposite(d))
        for mi, (g, _) in enumerate(maps):
            dg = apply_basis_change(d, g)
            ex = extremals_in_order(dg, delta)
            suffix = "" if mi == 0 and ident else "@g%d" % mi
            for i in q.vertices:
                G = generator(dg, i, ex, cl, "e%s%s%s" % (i, letter, suffix))
                out.append(Presentation(G, q))
                out.append(Presentation(dual_generator(G), qop))
    return out


def all_generators(delta: Sequence[Vec], corpus: Sequence[Tuple[str, DimerModel]],
                   cl: GroupPresentation) -> List[SplittingModule]:
    """Distinct generators over all presentations, each carrying every tag it was met under."""
    found: Dict[SplittingModule, List[str]] = {}
    order: List[SplittingModule] = []
    for p in presentations(delta, corpus, cl):
        G = p.generator
        if G not in found:
            found[G] = []
            order.append(G)
        found[G].append(G.tag)
    out = []
    for G in order:
        tags = sorted(found[G], key=_tag_rank)
        out.append(G.retag(tags[0], tuple(tags)))
    return out


def _tag_rank(tag: str):
    # plain presentations first, then duals, then other lattice symmetries
    return ("@" in tag, "*" in tag, len(tag), tag)


def realizing_mutations(g: "ExchangeGraph", pres: Sequence[Presentation]) -> Dict[Tuple[int, int], List[Tuple[str, str]]]:
    """For each edge, the (presentation tag, vertex) pairs whose single mutation crosses it."""
    index = {G: n for n, G in enumerate(g.nodes)}
    edges = set(g.edges)
    out: Dict[Tuple[int, int], List[Tuple[str, str]]] = {e: [] for e in g.edges}
    for p in pres:
        a = index.get(p.generator)
        if a is None:
            continue
        for k in mutable_vertices(p.quiver):
            if p.generator.by_vertex()[k].is_zero():
                continue
            b = index.get(mutate_generator(p.generator, p.quiver, k))
            if b is None:
                continue
            e = (min(a, b), max(a, b))
            if e in edges:
                out[e].append((p.generator.tag, k))
    return out


@dataclass
class ExchangeGraph:
    nodes: List[SplittingModule]
    edges: List[Tuple[int, int]] = field(default_factory=list)

    def labels(self) -> List[str]:
        return [n.tag for n in self.nodes]

    def to_dot(self, name: str = "EG") -> str:
        lines = ["graph %s {" % name]
        for i, n in enumerate(self.nodes):
            lines.append('  n%d [label="%s"];' % (i, n.tag))
        for a, b in self.edges:
            lines.append("  n%d -- n%d;" % (a, b))
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_exchange_graph(gens: Sequence[SplittingModule]) -> ExchangeGraph:
    """Edges join generators sharing all but one summand."""
    gens = list(gens)
    if not gens:
        raise ExchangeError("no generators")
    size = len(gens[0])
    if any(len(G) != size for G in gens):
        raise ExchangeError("generators have different numbers of summands")
    sets = [set(G.classes) for G in gens]
    edges = []
    for a in range(len(gens)):
        for b in range(a + 1, len(gens)):
            if len(sets[a] & sets[b]) == size - 1:
                edges.append((a, b))
    return ExchangeGraph(gens, edges)


def is_connected(g: ExchangeGraph) -> bool:
    if not g.nodes:
        return True
    adj: Dict[int, List[int]] = {i: [] for i in range(len(g.nodes))}
    for a, b in g.edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = {0}
    stack = [0]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(g.nodes)


@dataclass(frozen=True)
class Witness:
    source: SplittingModule
    basis_index: int
    target: SplittingModule


def check_mm1_connected(gens: Sequence[SplittingModule], cl: GroupPresentation) -> Tuple[bool, List[Witness]]:
    """Twisting criterion for connectivity of the exchange graph of all splitting MM modules.

    For each basis class [I_j] collect every N with twist(N, [I_j]) again a
    generator. The answer is True when the witnessed classes generate Cl.
    """
    if not is_connected(build_exchange_graph(gens)):
        raise ExchangeError("the exchange graph of generators is disconnected")
    known = {G: G for G in gens}
    witnesses: List[Witness] = []
    hit = []
    for j in range(cl.n):
        c = basis_class(cl, j)
        found = False
        for N in gens:
            M = twist(N, c)
            if M in known:
                witnesses.append(Witness(N, j, known[M]))
                found = True
        if found:
            hit.append([int(i == j) for i in range(cl.n)])
    return subgroup_is_everything(cl, hit), witnesses
