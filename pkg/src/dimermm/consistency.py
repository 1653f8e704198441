"""Consistency of dimer models via exact R-charge feasibility."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .dimer_core import DimerError, DimerModel, QuiverWithPotential, dual_qp, validate
from .matchings import enumerate_matchings, is_nondegenerate, pm_polygon

RCharge = Dict[str, Fraction]


def simplex_max(c: Sequence, A: Sequence[Sequence], b: Sequence) -> Optional[List[Fraction]]:
    """Maximize c.x subject to A x = b, x >= 0, in exact arithmetic.

    Two-phase tableau simplex with Bland's rule. Returns an optimal vertex,
    or None when infeasible. Raises ValueError when unbounded.
    """
    m, n = len(A), len(c)
    rows = []
    for i in range(m):
        r = [Fraction(x) for x in A[i]] + [Fraction(b[i])]
        if r[-1] < 0:
            r = [-x for x in r]
        rows.append(r)
    # artificial variables n .. n+m-1
    T = [r[:n] + [Fraction(int(i == k)) for k in range(m)] + [r[-1]] for i, r in enumerate(rows)]
    basis = list(range(n, n + m))
    width = n + m

    def pivot(r: int, col: int) -> None:
        p = T[r][col]
        T[r] = [x / p for x in T[r]]
        for i in range(m):
            if i != r and T[i][col] != 0:
                f = T[i][col]
                T[i] = [x - f * y for x, y in zip(T[i], T[r])]
        basis[r] = col

    def run(cost: List[Fraction], allowed: int) -> None:
        while True:
            # reduced costs for maximization
            entering = None
            for j in range(allowed):
                if j in basis:
                    continue
                rc = cost[j] - sum(cost[basis[i]] * T[i][j] for i in range(m))
                if rc > 0:
                    entering = j
                    break
            if entering is None:
                return
            best = None
            for i in range(m):
                if T[i][entering] > 0:
                    ratio = T[i][-1] / T[i][entering]
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                raise ValueError("linear program is unbounded")
            pivot(best[1], entering)

    phase1 = [Fraction(0)] * n + [Fraction(-1)] * m
    run(phase1, width)
    if sum(T[i][-1] for i in range(m) if basis[i] >= n) != 0:
        return None
    # drive remaining artificials out of the basis
    for i in range(m):
        if basis[i] >= n:
            for j in range(n):
                if T[i][j] != 0 and j not in basis:
                    pivot(i, j)
                    break
    keep = [i for i in range(m) if basis[i] < n]
    T[:] = [T[i] for i in keep]
    basis[:] = [basis[i] for i in keep]
    m = len(T)
    run([Fraction(x) for x in c] + [Fraction(0)] * (width - n), n)
    x = [Fraction(0)] * n
    for i in range(m):
        x[basis[i]] = T[i][-1]
    return x


def _system(q: QuiverWithPotential):
    arrows = [a.id for a in q.arrows]
    idx = {a: i for i, a in enumerate(arrows)}
    eqs = []
    for cyc, _ in q.potential:
        row = [0] * len(arrows)
        for a in cyc:
            row[idx[a]] += 1
        eqs.append((row, 2))
    for v in q.vertices:
        row = [0] * len(arrows)
        deg = 0
        for a in q.arrows:
            for end in (a.tail, a.head):
                if end == v:
                    row[idx[a.id]] += 1
                    deg += 1
        eqs.append((row, deg - 2))
    return arrows, eqs


def check_rcharge(q: QuiverWithPotential, R: RCharge) -> bool:
    """Exact substitution check of all three condition families."""
    arrows, eqs = _system(q)
    if set(R) != set(arrows) or any(R[a] <= 0 for a in arrows):
        return False
    return all(sum(c * R[a] for c, a in zip(row, arrows)) == rhs for row, rhs in eqs)


def rcharge_feasible(q: QuiverWithPotential) -> Optional[RCharge]:
    """A consistent R-charge of ``q`` in exact rationals, or None.

    Writes R(a) = eps + s(a) with s >= 0 and maximizes eps <= 1; the system
    is feasible with strictly positive charges iff the optimum is positive.
    """
    for a in q.arrows:
        n_plus = sum(1 for cyc, c in q.potential if c > 0 and a.id in cyc)
        n_minus = sum(1 for cyc, c in q.potential if c < 0 and a.id in cyc)
        if n_plus != 1 or n_minus != 1:
            raise DimerError("quiver is not dimer dual at arrow %s" % a.id)
    arrows, eqs = _system(q)
    n = len(arrows)
    # variables: s_0..s_{n-1}, eps, slack (eps + slack = 1)
    A, b = [], []
    for row, rhs in eqs:
        A.append(list(row) + [sum(row), 0])
        b.append(rhs)
    A.append([0] * n + [1, 1])
    b.append(1)
    c = [0] * n + [1, 0]
    x = simplex_max(c, A, b)
    if x is None or x[n] <= 0:
        return None
    R = {a: x[n] + x[i] for i, a in enumerate(arrows)}
    assert check_rcharge(q, R)
    return R


@dataclass(frozen=True)
class ConsistencyReport:
    nondegenerate: bool
    rcharge_feasible: bool
    multiplicities_one: bool
    rcharge: Optional[Dict[str, Fraction]] = None

    @property
    def consistent(self) -> bool:
        return self.nondegenerate and self.rcharge_feasible


def check_consistency(d: DimerModel) -> ConsistencyReport:
    rep = validate(d)
    if not rep.ok:
        raise DimerError("invalid dimer: " + "; ".join(rep.problems))
    ms = enumerate_matchings(d)
    nd = is_nondegenerate(d, ms)
    R = rcharge_feasible(dual_qp(d))
    mult_ok = False
    if ms:
        poly = pm_polygon(d, matchings=ms)
        mult_ok = all(poly.mult[v] == 1 for v in poly.hull)
    if nd and R is not None and not mult_ok:
        raise AssertionError("consistent dimer with a hull vertex of multiplicity > 1")
    return ConsistencyReport(nd, R is not None, mult_ok, R)
