"""Divisorial ideal tables of consistent dimers and splitting generators as class multisets."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .classgroup import DivisorClass, GroupPresentation, class_add, class_neg, class_sub, classify
from .dimer_core import DimerModel, QuiverWithPotential, dual_qp
from .matchings import PerfectMatching
from .qp_mutation import mutable_vertices


class GeneratorError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SplittingModule:
    """A multiset of pairwise distinct rank one classes.

    ``summands`` optionally records the quiver vertex of each class.
    """
    classes: Tuple[DivisorClass, ...]
    tag: str = ""
    summands: Optional[Tuple[Tuple[str, DivisorClass], ...]] = field(default=None)
    aliases: Tuple[str, ...] = ()

    @staticmethod
    def of(classes: Iterable[DivisorClass], tag: str = "", summands=None) -> "SplittingModule":
        cs = tuple(sorted(classes))
        if len(set(cs)) != len(cs):
            raise GeneratorError("summands of %s are not pairwise distinct" % (tag or "module"))
        return SplittingModule(cs, tag, None if summands is None else tuple(sorted(summands.items() if isinstance(summands, dict) else summands)))

    def __eq__(self, other) -> bool:
        return isinstance(other, SplittingModule) and self.classes == other.classes

    def __hash__(self) -> int:
        return hash(self.classes)

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def is_generator(self) -> bool:
        return any(c.is_zero() for c in self.classes)

    def by_vertex(self) -> Dict[str, DivisorClass]:
        if self.summands is None:
            raise GeneratorError("no vertex labelling recorded for %s" % (self.tag or "module"))
        return dict(self.summands)

    def retag(self, tag: str, aliases: Tuple[str, ...] = ()) -> "SplittingModule":
        return SplittingModule(self.classes, tag, self.summands, tuple(aliases))


def SplittingGenerator(classes: Iterable[DivisorClass], tag: str = "", summands=None) -> SplittingModule:
    """A splitting module containing the zero class exactly once."""
    m = SplittingModule.of(classes, tag, summands)
    if not m.is_generator:
        raise GeneratorError("generator %s does not contain R" % (tag or ""))
    return m


def value_vector(extremals: Sequence[PerfectMatching], arrows: Sequence[str], signs: Optional[Sequence[int]] = None) -> List[int]:
    signs = signs or [1] * len(arrows)
    return [sum(s for a, s in zip(arrows, signs) if a in set(P)) for P in extremals]


def _bfs_paths(q: QuiverWithPotential, i: str) -> Dict[str, List[str]]:
    paths = {i: []}
    queue = deque([i])
    while queue:
        v = queue.popleft()
        for a in sorted(q.out_arrows(v), key=lambda a: a.id):
            if a.head not in paths:
                paths[a.head] = paths[v] + [a.id]
                queue.append(a.head)
    return paths


def ideal_vectors(d: DimerModel, i: str, extremals: Sequence[PerfectMatching]) -> Dict[str, List[int]]:
    """Raw PM-value vectors of shortest paths i -> j (breadth first, arrows by id)."""
    q = dual_qp(d)
    if i not in q.vertices:
        raise GeneratorError("unknown quiver vertex %r" % i)
    paths = _bfs_paths(q, i)
    if len(paths) != len(q.vertices):
        raise GeneratorError("quiver is not strongly connected from %s" % i)
    return {j: value_vector(extremals, p) for j, p in paths.items()}


def vertex_ideal_table(d: DimerModel, i: str, extremals: Sequence[PerfectMatching],
                       cl: GroupPresentation) -> Dict[str, DivisorClass]:
    """j -> class of T_ij, checked to be independent of the path.

    Independence is verified arrow by arrow: T_{i,h(a)} = T_{i,t(a)} + [p(a)]
    for every arrow a, which covers every path, not only a second one.
    """
    q = dual_qp(d)
    vecs = ideal_vectors(d, i, extremals)
    table = {j: classify(cl, u) for j, u in vecs.items()}
    for a in q.arrows:
        step = classify(cl, value_vector(extremals, [a.id]))
        if class_add(table[a.tail], step) != table[a.head]:
            raise GeneratorError("T_%s%s depends on the path (arrow %s)" % (i, a.head, a.id))
    return table


def generator(d: DimerModel, i: str, extremals: Sequence[PerfectMatching], cl: GroupPresentation,
              tag: str = "") -> SplittingModule:
    table = vertex_ideal_table(d, i, extremals, cl)
    return SplittingGenerator(table.values(), tag or "e%s" % i, table)


def dual_generator(G: SplittingModule) -> SplittingModule:
    summ = None if G.summands is None else {v: class_neg(c) for v, c in G.summands}
    if G.tag.startswith("(") and G.tag.endswith(")*"):
        tag = G.tag[1:-2]
    else:
        tag = "(%s)*" % G.tag if G.tag else ""
    return SplittingModule.of((class_neg(c) for c in G.classes), tag, summ)


def twist(M: SplittingModule, c: DivisorClass) -> SplittingModule:
    summ = None if M.summands is None else {v: class_add(x, c) for v, x in M.summands}
    return SplittingModule.of((class_add(x, c) for x in M.classes), M.tag, summ)


def generator_forms(M: SplittingModule, known: Iterable[SplittingModule]) -> List[Tuple[SplittingModule, DivisorClass]]:
    """All (N, c) with N known and M = twist(N, c)."""
    index = {}
    for N in known:
        index.setdefault(N, N)
    out = []
    for c in M.classes:
        N = twist(M, class_neg(c))
        if N in index:
            out.append((index[N], c))
    return out


def mutate_generator(G: SplittingModule, q: QuiverWithPotential, k: str, base: Optional[str] = None) -> SplittingModule:
    """Replace the summand at k by [M_t(a1)] + [M_t(a2)] - [M_k], a1, a2 the arrows into k."""
    if k not in mutable_vertices(q):
        raise GeneratorError("vertex %s is not mutable" % k)
    cls = G.by_vertex()
    if base is None:
        zeros = [v for v, c in cls.items() if c.is_zero()]
        base = zeros[0] if len(zeros) == 1 else None
    if k == base:
        raise GeneratorError("cannot mutate at the base vertex %s" % k)
    a1, a2 = q.in_arrows(k)
    new = class_sub(class_add(cls[a1.tail], cls[a2.tail]), cls[k])
    out = dict(cls)
    out[k] = new
    return SplittingModule.of(out.values(), "mu%s(%s)" % (k, G.tag), out)
