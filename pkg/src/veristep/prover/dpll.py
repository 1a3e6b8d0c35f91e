"""DPLL with two-watched-literal unit propagation and chronological backtracking."""

from __future__ import annotations


class BudgetExceeded(Exception):
    pass


def solve(num_vars: int, clauses: list[list[int]], max_decisions: int = 10**6) -> list[bool] | None:
    """Return a satisfying assignment indexed by variable (slot 0 unused), or None.

    Decisions are taken on the lowest unassigned variable, false polarity first,
    so results are deterministic. Raises BudgetExceeded after ``max_decisions``.
    """
    value = [0] * (num_vars + 1)  # 0 unassigned, 1 true, -1 false
    watches: dict[int, list[int]] = {}
    live: list[list[int]] = []
    units: list[int] = []
    for clause in clauses:
        lits = list(dict.fromkeys(clause))
        seen = set(lits)
        if any(-lit in seen for lit in lits):
            continue
        if not lits:
            return None
        if len(lits) == 1:
            units.append(lits[0])
            continue
        idx = len(live)
        live.append(lits)
        watches.setdefault(lits[0], []).append(idx)
        watches.setdefault(lits[1], []).append(idx)

    trail: list[int] = []

    def lit_value(lit: int) -> int:
        v = value[lit if lit > 0 else -lit]
        return v if lit > 0 else -v

    def enqueue(lit: int) -> bool:
        v = lit_value(lit)
        if v == -1:
            return False
        if v == 0:
            value[abs(lit)] = 1 if lit > 0 else -1
            trail.append(lit)
        return True

    def propagate(head: int) -> bool:
        while head < len(trail):
            false_lit = -trail[head]
            head += 1
            watching = watches.get(false_lit)
            if not watching:
                continue
            kept: list[int] = []
            for pos, ci in enumerate(watching):
                c = live[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                if lit_value(c[0]) == 1:
                    kept.append(ci)
                    continue
                for k in range(2, len(c)):
                    if lit_value(c[k]) != -1:
                        c[1], c[k] = c[k], c[1]
                        watches.setdefault(c[1], []).append(ci)
                        break
                else:
                    kept.append(ci)
                    if not enqueue(c[0]):
                        kept.extend(watching[pos + 1:])
                        watches[false_lit] = kept
                        return False
            watches[false_lit] = kept
        return True

    for lit in units:
        if not enqueue(lit):
            return None
    if not propagate(0):
        return None

    decisions = 0
    stack: list[tuple[int, int, bool]] = []  # (trail length before decision, var, flipped)
    while True:
        var = next((v for v in range(1, num_vars + 1) if value[v] == 0), None)
        if var is None:
            return [v == 1 for v in value]
        decisions += 1
        if decisions > max_decisions:
            raise BudgetExceeded(f"exceeded {max_decisions} decisions")
        stack.append((len(trail), var, False))
        head = len(trail)
        enqueue(-var)
        while not propagate(head):
            while stack and stack[-1][2]:
                stack.pop()
            if not stack:
                return None
            mark, var, _ = stack.pop()
            for lit in trail[mark:]:
                value[abs(lit)] = 0
            del trail[mark:]
            decisions += 1
            if decisions > max_decisions:
                raise BudgetExceeded(f"exceeded {max_decisions} decisions")
            stack.append((mark, var, True))
            head = len(trail)
            enqueue(var)
