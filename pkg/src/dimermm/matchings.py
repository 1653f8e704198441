"""Perfect matchings, their homology differences and the perfect matching polygon."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .dimer_core import DimerModel, QuiverWithPotential, Vec

PerfectMatching = Tuple[str, ...]


class MatchingError(ValueError):
    pass


def enumerate_matchings(d: DimerModel) -> List[PerfectMatching]:
    """All perfect matchings of ``d``, each a sorted tuple of edge ids, in lexicographic order."""
    inc: Dict[str, List[str]] = {v: [] for v, _ in d.vertices}
    for e in d.edges:
        inc[e.white].append(e.id)
        if e.black != e.white:
            inc[e.black].append(e.id)
    out: List[PerfectMatching] = []
    covered: Dict[str, bool] = {v: False for v in inc}
    chosen: List[str] = []

    def rec(left: int) -> None:
        if left == 0:
            out.append(tuple(sorted(chosen)))
            return
        # branch on the uncovered vertex with fewest usable edges
        best = None
        for v in sorted(inc):
            if covered[v]:
                continue
            opts = [e for e in inc[v] if not covered[d.other_end(v, e)]]
            if best is None or len(opts) < len(best[1]):
                best = (v, opts)
                if not opts:
                    return
        v, opts = best
        for e in sorted(opts):
            u = d.other_end(v, e)
            covered[v] = covered[u] = True
            chosen.append(e)
            rec(left - 2)
            chosen.pop()
            covered[v] = covered[u] = False

    if len(inc) % 2 == 0:
        rec(len(inc))
    return sorted(out)


def is_perfect_matching(d: DimerModel, P: Sequence[str]) -> bool:
    seen = []
    for e in P:
        if e not in d.edge:
            return False
        seen += [d.edge[e].white, d.edge[e].black]
    return sorted(seen) == sorted(v for v, _ in d.vertices)


def is_nondegenerate(d: DimerModel, matchings: Optional[List[PerfectMatching]] = None) -> bool:
    ms = enumerate_matchings(d) if matchings is None else matchings
    used = {e for P in ms for e in P}
    return used == set(d.edge)


def homology_class(d: DimerModel, P: Sequence[str], P0: Sequence[str]) -> Vec:
    """h(P, P0): displacement sum of P minus that of P0."""
    for M in (P, P0):
        if not is_perfect_matching(d, M):
            raise MatchingError("%s is not a perfect matching of this dimer" % (tuple(M),))
    x = sum(d.edge[e].dx for e in P) - sum(d.edge[e].dx for e in P0)
    y = sum(d.edge[e].dy for e in P) - sum(d.edge[e].dy for e in P0)
    return (x, y)


def _cross(o: Vec, a: Vec, b: Vec) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> List[Vec]:
    """Strict hull vertices in counterclockwise order (monotone chain, collinear points dropped)."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: List[Vec] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: List[Vec] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class PMPolygon:
    base: PerfectMatching
    multiplicity: Tuple[Tuple[Vec, int], ...]
    hull: Tuple[Vec, ...]
    by_point: Tuple[Tuple[Vec, Tuple[PerfectMatching, ...]], ...]

    @property
    def mult(self) -> Dict[Vec, int]:
        return dict(self.multiplicity)

    @property
    def matchings_at(self) -> Dict[Vec, Tuple[PerfectMatching, ...]]:
        return dict(self.by_point)


def default_base(d: DimerModel, matchings: Optional[List[PerfectMatching]] = None) -> PerfectMatching:
    if d.base_matching is not None:
        return tuple(d.base_matching)
    ms = enumerate_matchings(d) if matchings is None else matchings
    if not ms:
        raise MatchingError("dimer has no perfect matchings")
    return ms[0]


def pm_polygon(d: DimerModel, P0: Optional[Sequence[str]] = None,
               matchings: Optional[List[PerfectMatching]] = None) -> PMPolygon:
    ms = enumerate_matchings(d) if matchings is None else matchings
    base = tuple(sorted(P0)) if P0 is not None else default_base(d, ms)
    at: Dict[Vec, List[PerfectMatching]] = {}
    for P in ms:
        at.setdefault(homology_class(d, P, base), []).append(P)
    return PMPolygon(
        base=base,
        multiplicity=tuple(sorted((p, len(v)) for p, v in at.items())),
        hull=tuple(convex_hull(at)),
        by_point=tuple(sorted((p, tuple(v)) for p, v in at.items())),
    )


def extremal_matchings(d: DimerModel, P0: Optional[Sequence[str]], vertex_order: Sequence[Vec],
                       polygon: Optional[PMPolygon] = None) -> Dict[Vec, PerfectMatching]:
    """The matching at each requested hull vertex, keyed in the given order."""
    poly = pm_polygon(d, P0) if polygon is None else polygon
    at = poly.matchings_at
    out: Dict[Vec, PerfectMatching] = {}
    for v in vertex_order:
        v = tuple(v)
        if v not in poly.hull:
            raise MatchingError("%s is not a vertex of the matching polygon" % (v,))
        if len(at[v]) != 1:
            raise MatchingError("hull vertex %s has multiplicity %d" % (v, len(at[v])))
        out[v] = at[v][0]
    return out


def path_value(P: Sequence[str], path: Sequence[str], q: Optional[QuiverWithPotential] = None) -> int:
    """Number of arrows of ``path`` whose edge lies in ``P``.

    An id ``x*`` not present in ``q`` is read as the reverse of ``x`` and
    contributes ``-P(x)``.
    """
    Pset = set(P)
    total = 0
    prev_head = None
    for a in path:
        rev = False
        if q is not None and a not in q.arrow:
            if a.endswith("*") and a[:-1] in q.arrow:
                rev = True
            else:
                raise MatchingError("unknown arrow %s" % a)
        elif q is None and a.endswith("*") and a[:-1] in Pset:
            rev = True
        base = a[:-1] if rev else a
        if q is not None:
            arr = q.arrow[base]
            t, h = (arr.head, arr.tail) if rev else (arr.tail, arr.head)
            if prev_head is not None and prev_head != t:
                raise MatchingError("path is not composable at %s" % a)
            prev_head = h
        if base in Pset:
            total += -1 if rev else 1
    return total


def translate_to(poly: PMPolygon, target: Sequence[Vec]) -> Optional[Vec]:
    """Translation t with hull + t == target as sets, or None."""
    hull = sorted(poly.hull)
    tgt = sorted(tuple(v) for v in target)
    if len(hull) != len(tgt) or not hull:
        return None
    t = (tgt[0][0] - hull[0][0], tgt[0][1] - hull[0][1])
    if all((h[0] + t[0], h[1] + t[1]) == g for h, g in zip(hull, tgt)):
        return t
    return None


def extremals_in_order(d: DimerModel, target: Sequence[Vec], polygon: Optional[PMPolygon] = None) -> List[PerfectMatching]:
    """Extremal matchings listed along ``target``, whose polygon must be a translate of ours."""
    poly = pm_polygon(d) if polygon is None else polygon
    t = translate_to(poly, target)
    if t is None:
        raise MatchingError("matching polygon %s is not a translate of %s" % (poly.hull, list(target)))
    order = [(v[0] - t[0], v[1] - t[1]) for v in target]
    ex = extremal_matchings(d, poly.base, order, poly)
    return [ex[v] for v in order]
