"""Solvers for the commitment solution concepts.

* ``solve_seslo``: one LP over joint recommendation distributions — the
  row-deviation constraints only range over each indistinguishability cell.
* ``solve_selo`` / ``solve_best_nash``: exact support enumeration.  For every
  support pair (rows R_sup, columns C_sup) the feasible profiles form a
  product of two polytopes, P1 (row mixtures keeping every supported column
  a best response) and P2 (column mixtures keeping every supported row
  undominated within its cell, or globally for Nash).  The bilinear row
  payoff attains its maximum at a vertex pair, so we enumerate P2's vertices
  and solve one LP over P1 per vertex.
* ``solve_stackelberg``: the classic one-LP-per-column method.
* ``solve_max_ce``: ``solve_seslo`` with all rows merged into one cell.

Support pairs are visited in increasing total cardinality, lexicographic
within, and the reported witness is the first optimum in that order.  The
search skips a pair only when a proven upper bound for it cannot beat the
best value already found, so values and witnesses are identical to the
unpruned enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

from .deviations import verify_correlated, verify_mixed
from .errors import ScaleGuardExceeded
from .games import (
    CorrelatedProfile,
    Game,
    MixedProfile,
    Number,
    SISPartition,
    to_mode,
)
from .linprog import (
    INFEASIBLE,
    OPTIMAL,
    LinearProgram,
    Polytope,
    enumerate_vertices,
    solve_lp,
)

SESLO = "SESLO"
SELO = "SELO"
STACKELBERG = "STACKELBERG"
BEST_NASH = "BEST_NASH"
MAX_CE = "MAX_CE"

#: support enumeration refuses games with more than this many actions total
#: unless explicitly overridden
SCALE_GUARD = 14

#: run the per-pair bound gate before vertex enumeration once the number of
#: candidate tight-constraint subsets passes this
_GATE_THRESHOLD = 3000


@dataclass
class SearchStats:
    supports_examined: int = 0
    lps_solved: int = 0


@dataclass
class SolveReport:
    concept: str
    mode: str
    value: Number
    witness: MixedProfile | CorrelatedProfile
    verifier_passed: bool
    stats: SearchStats = field(default_factory=SearchStats)


# ---------------------------------------------------------------------------
# SESLO (single LP)


def _seslo_lp(u1, u2, partition: SISPartition, m: int, n: int) -> LinearProgram:
    nv = m * n

    def var(r, c):
        return r * n + c

    cons = []
    for cell in partition.cells:
        for r in cell:
            for r2 in cell:
                if r2 == r:
                    continue
                row = [0] * nv
                for c in range(n):
                    row[var(r, c)] = u1[r2][c] - u1[r][c]
                cons.append((tuple(row), "<=", 0))
    for c in range(n):
        for c2 in range(n):
            if c2 == c:
                continue
            row = [0] * nv
            for r in range(m):
                row[var(r, c)] = u2[r][c2] - u2[r][c]
            cons.append((tuple(row), "<=", 0))
    cons.append((tuple([1] * nv), "=", 1))
    obj = tuple(u1[r][c] for r in range(m) for c in range(n))
    return LinearProgram(obj, "max", tuple(cons), nv)


def solve_seslo(game: Game, mode: str = "exact") -> SolveReport:
    """Best row payoff over signal distributions with no undetectable
    beneficial deviations; always feasible (any correlated equilibrium is)."""
    u1, u2 = game.payoffs_in_mode(mode)
    m, n = game.num_rows, game.num_cols
    out = solve_lp(_seslo_lp(u1, u2, game.partition, m, n), mode)
    if out.status != OPTIMAL:
        raise RuntimeError(f"signal LP unexpectedly {out.status}")
    p = [[out.solution[r * n + c] for c in range(n)] for r in range(m)]
    witness = CorrelatedProfile(p, mode)
    report = verify_correlated(game, witness, mode)
    return SolveReport(
        concept=SESLO,
        mode=mode,
        value=out.value,
        witness=witness,
        verifier_passed=report.passed,
        stats=SearchStats(supports_examined=0, lps_solved=1),
    )


def solve_max_ce(game: Game, mode: str = "exact") -> SolveReport:
    """Row-optimal correlated equilibrium: the one-cell special case."""
    merged = game.with_partition(SISPartition.one_cell(game.num_rows))
    report = solve_seslo(merged, mode)
    report.concept = MAX_CE
    return report


# ---------------------------------------------------------------------------
# Stackelberg (one LP per induced column)


def _induce_column_lp(u1, u2, m: int, n: int, cstar: int, rows=None) -> LinearProgram:
    rows = list(range(m)) if rows is None else list(rows)
    cons = []
    for c in range(n):
        if c == cstar:
            continue
        cons.append((tuple(u2[r][cstar] - u2[r][c] for r in rows), ">=", 0))
    cons.append((tuple([1] * len(rows)), "=", 1))
    obj = tuple(u1[r][cstar] for r in rows)
    return LinearProgram(obj, "max", tuple(cons), len(rows))


def solve_stackelberg(game: Game, mode: str = "exact") -> SolveReport:
    """Full-commitment optimum, ties broken in the row player's favor."""
    u1, u2 = game.payoffs_in_mode(mode)
    m, n = game.num_rows, game.num_cols
    stats = SearchStats()
    best = None
    witness = None
    for cstar in range(n):
        out = solve_lp(_induce_column_lp(u1, u2, m, n, cstar), mode)
        stats.lps_solved += 1
        if out.status != OPTIMAL:
            continue
        if best is None or out.value > best:
            best = out.value
            sigma2 = [to_mode(0, mode)] * n
            sigma2[cstar] = to_mode(1, mode)
            witness = MixedProfile(out.solution, sigma2, mode)
    if best is None:
        raise RuntimeError("no inducible column; this cannot happen for a valid game")
    partition_ignored = verify_mixed(
        game.with_partition(SISPartition.singletons(m)), witness, mode
    )
    return SolveReport(
        concept=STACKELBERG,
        mode=mode,
        value=best,
        witness=witness,
        verifier_passed=partition_ignored.passed,
        stats=stats,
    )


# ---------------------------------------------------------------------------
# support enumeration core (shared by SELO and best-Nash)


class _SupportSearch:
    """Vertex-pair search over support pairs with sound pruning.

    ``p2_rows(rsup, csup)`` supplies the column-polytope inequalities (the
    only part that differs between the limited-observation and Nash
    concepts), as rows over the csup coordinates.
    """

    def __init__(self, game: Game, mode: str, p2_rows, upper_bound=None, prune: bool = True):
        self.game = game
        self.mode = mode
        self.p2_rows = p2_rows
        self.prune = prune  # False exercises the raw enumeration in tests
        self.upper_bound = None if upper_bound is None else to_mode(upper_bound, mode)
        self.u1, self.u2 = game.payoffs_in_mode(mode)
        self.m, self.n = game.num_rows, game.num_cols
        self.stats = SearchStats()
        self.best = None
        self.witness = None
        self._rowmax: dict = {}
        self._single_cap: dict = {}
        self._csup_info: dict = {}

    # -- cached bounds ------------------------------------------------------

    def _row_maxima(self, csup):
        got = self._rowmax.get(csup)
        if got is None:
            got = [max(self.u1[r][c] for c in csup) for r in range(self.m)]
            self._rowmax[csup] = got
        return got

    def _p1_lp(self, rsup, csup, objective) -> LinearProgram:
        cons = []
        for c in csup:
            for c2 in range(self.n):
                if c2 == c:
                    continue
                cons.append(
                    (tuple(self.u2[r][c] - self.u2[r][c2] for r in rsup), ">=", 0)
                )
        cons.append((tuple([1] * len(rsup)), "=", 1))
        return LinearProgram(tuple(objective), "max", tuple(cons), len(rsup))

    def single_cap(self, c: int):
        """Best row payoff in column c over mixtures making c a best response;
        None when c can never be a best response."""
        if c not in self._single_cap:
            lp = self._p1_lp(tuple(range(self.m)), (c,), [self.u1[r][c] for r in range(self.m)])
            out = solve_lp(lp, self.mode)
            self.stats.lps_solved += 1
            self._single_cap[c] = out.value if out.status == OPTIMAL else None
        return self._single_cap[c]

    def csup_cap(self, csup):
        """Best row payoff in any csup column over mixtures keeping all of
        csup simultaneously best responses; None when that set is empty."""
        if csup not in self._csup_info:
            cap = None
            feasible = True
            allrows = tuple(range(self.m))
            for c in csup:
                lp = self._p1_lp(allrows, csup, [self.u1[r][c] for r in range(self.m)])
                out = solve_lp(lp, self.mode)
                self.stats.lps_solved += 1
                if out.status != OPTIMAL:
                    feasible = False
                    break
                if cap is None or out.value > cap:
                    cap = out.value
            self._csup_info[csup] = cap if feasible else None
        return self._csup_info[csup]

    # -- the P2 side --------------------------------------------------------

    def _p2_polytope(self, rsup, csup) -> Polytope:
        rows = list(self.p2_rows(rsup, csup))
        rows.append((tuple([1] * len(csup)), "=", 1))
        return Polytope(num_vars=len(csup), constraints=tuple(rows))

    def _pair_gate(self, rsup, csup, poly) -> bool:
        """True when the pair can still beat the current best (may solve up
        to |rsup| LPs over the column polytope, which also detects emptiness)."""
        bound = None
        for r in rsup:
            lp = LinearProgram(
                objective=tuple(self.u1[r][c] for c in csup),
                sense="max",
                constraints=poly.constraints,
                num_vars=len(csup),
            )
            out = solve_lp(lp, self.mode)
            self.stats.lps_solved += 1
            if out.status == INFEASIBLE:
                return False  # the polytope is empty: same for every r
            if out.status == OPTIMAL and (bound is None or out.value > bound):
                bound = out.value
        return not (self.best is not None and bound is not None and bound <= self.best)

    # -- main loop ----------------------------------------------------------

    def run(self):
        m, n = self.m, self.n
        done = False
        for total in range(2, m + n + 1):
            if done:
                break
            for a in range(max(1, total - n), min(m, total - 1) + 1):
                if done:
                    break
                for rsup in combinations(range(m), a):
                    if done:
                        break
                    for csup in combinations(range(n), total - a):
                        self.stats.supports_examined += 1
                        if self._handle_pair(rsup, csup):
                            done = True
                            break
        if self.best is None:
            raise RuntimeError("support search found no feasible profile")
        return self.best, self.witness, self.stats

    def _handle_pair(self, rsup, csup) -> bool:
        """Evaluate one support pair; returns True to stop the whole search."""
        best = self.best
        if self.prune:
            rowmax = self._row_maxima(csup)
            rect = max(rowmax[r] for r in rsup)
            if best is not None and rect <= best:
                return False
            caps = []
            for c in csup:
                cap = self.single_cap(c)
                if cap is None:
                    return False  # some column in csup can never be a best response
                caps.append(cap)
            if best is not None and max(caps) <= best:
                return False
            cap = self.csup_cap(csup)
            if cap is None:
                return False
            if best is not None and cap <= best:
                return False

        poly = self._p2_polytope(rsup, csup)
        n_ineq = len(poly.constraints) - 1 + len(csup)  # plus nonnegativity rows
        need = len(csup) - 1
        if self.prune and 0 <= need <= n_ineq and math.comb(n_ineq, need) > _GATE_THRESHOLD:
            if not self._pair_gate(rsup, csup, poly):
                return False
        vertices = enumerate_vertices(poly, self.mode, check_bounded=False)
        for vert in vertices:
            weights = [
                sum(self.u1[r][c] * vert[j] for j, c in enumerate(csup)) for r in rsup
            ]
            out = solve_lp(self._p1_lp(rsup, csup, weights), self.mode)
            self.stats.lps_solved += 1
            if out.status == INFEASIBLE:
                break  # P1 does not depend on the vertex
            if out.status != OPTIMAL:
                raise RuntimeError(f"support LP unexpectedly {out.status}")
            if self.best is None or out.value > self.best:
                zero = to_mode(0, self.mode)
                sigma1 = [zero] * self.m
                for i, r in enumerate(rsup):
                    sigma1[r] = out.solution[i]
                sigma2 = [zero] * self.n
                for j, c in enumerate(csup):
                    sigma2[c] = vert[j]
                self.best = out.value
                self.witness = MixedProfile(sigma1, sigma2, self.mode)
                if self.upper_bound is not None and self.best >= self.upper_bound:
                    return True
        return False


def _check_scale(game: Game, allow_large: bool) -> None:
    size = game.num_rows + game.num_cols
    if size > SCALE_GUARD and not allow_large:
        raise ScaleGuardExceeded(
            f"game has {size} actions; support enumeration is exponential "
            f"(guard {SCALE_GUARD}, pass allow_large=True to override)"
        )


def solve_selo(
    game: Game,
    mode: str = "exact",
    upper_bound=None,
    allow_large: bool = False,
) -> SolveReport:
    """Best row payoff over uncorrelated profiles with no undetectable
    beneficial deviations.

    ``upper_bound`` (for instance a known signaling optimum, which always
    dominates) stops the search as soon as it is attained.
    """
    _check_scale(game, allow_large)
    u1, _ = game.payoffs_in_mode(mode)
    cells = game.partition.cells

    def p2_rows(rsup, csup):
        rset = set(rsup)
        for cell in cells:
            for r in cell:
                if r not in rset:
                    continue
                for r2 in cell:
                    if r2 == r:
                        continue
                    yield (tuple(u1[r][c] - u1[r2][c] for c in csup), ">=", 0)

    search = _SupportSearch(game, mode, p2_rows, upper_bound)
    value, witness, stats = search.run()
    report = verify_mixed(game, witness, mode)
    return SolveReport(
        concept=SELO,
        mode=mode,
        value=value,
        witness=witness,
        verifier_passed=report.passed,
        stats=stats,
    )


def solve_best_nash(game: Game, mode: str = "exact", allow_large: bool = False) -> SolveReport:
    """Row-optimal Nash equilibrium by support enumeration (the partition
    plays no role: every supported row must be a global best response)."""
    _check_scale(game, allow_large)
    u1, _ = game.payoffs_in_mode(mode)
    m = game.num_rows

    def p2_rows(rsup, csup):
        for r in rsup:
            for r2 in range(m):
                if r2 == r:
                    continue
                yield (tuple(u1[r][c] - u1[r2][c] for c in csup), ">=", 0)

    search = _SupportSearch(game, mode, p2_rows, None)
    value, witness, stats = search.run()
    report = verify_mixed(
        game.with_partition(SISPartition.one_cell(m)), witness, mode
    )
    return SolveReport(
        concept=BEST_NASH,
        mode=mode,
        value=value,
        witness=witness,
        verifier_passed=report.passed,
        stats=stats,
    )
