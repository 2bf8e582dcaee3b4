"""Exact linear programming over the rationals.

Two-phase primal simplex with Bland's rule (terminating, no cycling).
Every coefficient is a Fraction: feasibility answers, optimal points and
optimal values are exact. Variables are free; internally each is split
into a difference of two nonnegative columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .relunet import as_fraction

LE, GE, EQ = "<=", ">=", "=="
_RELATIONS = (LE, GE, EQ)


class UnboundedError(RuntimeError):
    """The requested objective decreases without bound."""


@dataclass(frozen=True)
class LinearConstraint:
    coeffs: tuple[Fraction, ...]
    relation: str
    rhs: Fraction

    def __post_init__(self):
        if self.relation not in _RELATIONS:
            raise ValueError(f"bad relation {self.relation!r}")

    def holds(self, point) -> bool:
        lhs = sum(c * x for c, x in zip(self.coeffs, point))
        if self.relation == LE:
            return lhs <= self.rhs
        if self.relation == GE:
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass
class LinearProgram:
    """Rational constraint rows plus an optional linear objective (minimized)."""

    num_vars: int
    constraints: list[LinearConstraint] = field(default_factory=list)
    objective: tuple[Fraction, ...] | None = None

    def constrain(self, coeffs, relation: str, rhs) -> None:
        coeffs = tuple(as_fraction(c) for c in coeffs)
        if len(coeffs) != self.num_vars:
            raise ValueError(f"constraint arity {len(coeffs)} != num_vars {self.num_vars}")
        self.constraints.append(LinearConstraint(coeffs, relation, as_fraction(rhs)))

    def set_objective(self, coeffs) -> None:
        coeffs = tuple(as_fraction(c) for c in coeffs)
        if len(coeffs) != self.num_vars:
            raise ValueError("objective arity mismatch")
        self.objective = coeffs

    def satisfied_by(self, point) -> bool:
        if len(point) != self.num_vars:
            return False
        return all(con.holds(point) for con in self.constraints)


_ZERO = Fraction(0)
_ONE = Fraction(1)


def _pivot(rows, cost, basis, pivot_row, pivot_col, stats) -> None:
    factor = rows[pivot_row][pivot_col]
    rows[pivot_row] = [v / factor for v in rows[pivot_row]]
    for i, row in enumerate(rows):
        if i != pivot_row and row[pivot_col] != 0:
            scale = row[pivot_col]
            rows[i] = [v - scale * w for v, w in zip(row, rows[pivot_row])]
    if cost[pivot_col] != 0:
        scale = cost[pivot_col]
        for j, w in enumerate(rows[pivot_row]):
            cost[j] -= scale * w
    basis[pivot_row] = pivot_col
    if stats is not None:
        stats["pivots"] = stats.get("pivots", 0) + 1


def _simplex_min(rows, cost, basis, num_cols, stats) -> str:
    """Run Bland-rule simplex to optimality; returns 'optimal' or 'unbounded'."""
    while True:
        entering = next((j for j in range(num_cols) if cost[j] < 0), None)
        if entering is None:
            return "optimal"
        pivot_row = None
        best_ratio = None
        for i, row in enumerate(rows):
            if row[entering] > 0:
                ratio = row[-1] / row[entering]
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[pivot_row])
                ):
                    best_ratio = ratio
                    pivot_row = i
        if pivot_row is None:
            return "unbounded"
        _pivot(rows, cost, basis, pivot_row, entering, stats)


def _solve(lp: LinearProgram, objective, stats):
    """Shared two-phase core. Returns (point, value) or None; may raise UnboundedError."""
    n = lp.num_vars
    num_struct = 2 * n  # x_k = col(2k) - col(2k+1)
    slack_count = sum(1 for c in lp.constraints if c.relation != EQ)
    m = len(lp.constraints)
    num_cols = num_struct + slack_count + m  # artificials at the end

    rows = []
    basis = []
    slack_index = 0
    for row_idx, con in enumerate(lp.constraints):
        row = [_ZERO] * (num_cols + 1)
        for k, c in enumerate(con.coeffs):
            row[2 * k] = c
            row[2 * k + 1] = -c
        if con.relation != EQ:
            row[num_struct + slack_index] = _ONE if con.relation == LE else -_ONE
            slack_index += 1
        row[-1] = con.rhs
        if row[-1] < 0:
            row = [-v for v in row]
        art_col = num_struct + slack_count + row_idx
        row[art_col] = _ONE
        rows.append(row)
        basis.append(art_col)

    # Phase 1: minimize the artificial total.
    cost = [_ZERO] * (num_cols + 1)
    for j in range(num_cols + 1):
        total = sum(row[j] for row in rows)
        if j >= num_struct + slack_count and j < num_cols:
            cost[j] = _ONE - total
        else:
            cost[j] = -total
    _simplex_min(rows, cost, basis, num_cols, stats)
    if -cost[-1] != 0:
        return None  # artificials cannot all vanish: infeasible

    # Drive leftover artificials out of the basis (or drop redundant rows).
    art_start = num_struct + slack_count
    keep = []
    for i in range(len(rows)):
        if basis[i] >= art_start:
            pivot_col = next(
                (j for j in range(art_start) if rows[i][j] != 0), None
            )
            if pivot_col is None:
                continue  # redundant row
            _pivot(rows, cost, basis, i, pivot_col, stats)
        keep.append(i)
    rows = [rows[i] for i in keep]
    basis = [basis[i] for i in keep]

    def extract_point():
        values = [_ZERO] * num_struct
        for i, b in enumerate(basis):
            if b < num_struct:
                values[b] = rows[i][-1]
        return tuple(values[2 * k] - values[2 * k + 1] for k in range(n))

    if objective is None:
        return extract_point(), _ZERO

    # Phase 2 over the real objective; artificial columns are excluded from
    # the entering-variable scan so they can never rejoin the basis.
    cost = [_ZERO] * (num_cols + 1)
    for k, c in enumerate(objective):
        cost[2 * k] = c
        cost[2 * k + 1] = -c
    for i, b in enumerate(basis):
        if cost[b] != 0:
            scale = cost[b]
            for j, w in enumerate(rows[i]):
                cost[j] -= scale * w
    status = _simplex_min(rows, cost, basis, art_start, stats)
    if status == "unbounded":
        raise UnboundedError("objective is unbounded below")
    point = extract_point()
    value = sum(c * x for c, x in zip(objective, point))
    return point, value


def lp_feasible(lp: LinearProgram, stats: dict | None = None):
    """An exact feasible point, or None when the system is infeasible."""
    result = _solve(lp, None, stats)
    return None if result is None else result[0]


def lp_minimize(lp: LinearProgram, stats: dict | None = None):
    """Minimize lp.objective; returns (point, value), None if infeasible.

    Raises UnboundedError when the objective has no finite minimum.
    """
    if lp.objective is None:
        raise ValueError("lp has no objective")
    return _solve(lp, lp.objective, stats)
