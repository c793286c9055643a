"""Confluent-subdivision engine: rule families, moves, normalization.

A family of subdivision rules that is locally confluent, terminating and
facially compatible induces a canonical subdivision: every cell has a unique
terminal set reachable by nontrivial moves (Newman's lemma), and the closure
of that set subdivides the cell compatibly with face restriction.  This
module provides the generic machinery; the rule families themselves live
with their posets (cayley, classic, kmw, mixed).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .complexes import Subdivision, restriction, trivial_subdivision
from .errors import (
    FrameworkViolationError,
    FuelExhaustedError,
    InapplicableRuleError,
)

DEFAULT_FUEL = 10 ** 6


@dataclass(frozen=True)
class SubdivisionRule:
    """A named partial map cell -> Subdivision of that cell.

    ``name`` doubles as the deterministic ordering key within a family."""

    name: tuple
    applies_to: object
    apply: object

    def __lt__(self, other):
        return self.name < other.name


class RuleFamily:
    """An ordered family of subdivision rules.

    ``rules`` is the static list when the family is finite; parametric
    families override ``rules_for`` to generate the applicable instances for
    a given cell, sorted by rule name.
    """

    rules: tuple = ()

    def rules_for(self, cell):
        return tuple(r for r in self.rules if r.applies_to(cell))

    def is_terminal(self, cell) -> bool:
        """Within this engine every applicable rule splits its cell, so
        terminal means: no applicable rules.  (The paper-faithful check that
        tolerates rules returning trivial subdivisions is ``is_terminal``
        below.)"""
        return not self.rules_for(cell)

    def canonical(self, cell, fuel: int = DEFAULT_FUEL) -> Subdivision:
        """Memoized canonical subdivision of one cell."""
        cache = getattr(self, "_canon_cache", None)
        if cache is None:
            cache = {}
            self._canon_cache = cache
        k = cell.key()
        if k not in cache:
            cache[k] = canonical_subdivision(cell, self, fuel=fuel)
        return cache[k]


def move(cells: dict, x, rule: SubdivisionRule) -> dict:
    """One rewriting move: replace x in the cell set by Max(rule.apply(x)).

    ``cells`` maps canonical keys to cells; a fresh dict is returned."""
    k = x.key()
    if k not in cells:
        raise InapplicableRuleError("cell is not in the set")
    if not rule.applies_to(x):
        raise InapplicableRuleError(f"rule {rule.name} does not apply")
    sub = rule.apply(x)
    out = dict(cells)
    del out[k]
    for c in sub.max_cells:
        out[c.key()] = c
    return out


def is_terminal(cell, family: RuleFamily) -> bool:
    """True iff every applicable rule returns a subdivision keeping the cell
    as its only maximal element (i.e. no nontrivial move exists)."""
    for rule in family.rules_for(cell):
        if not rule.apply(cell).is_trivial_for(cell):
            return False
    return True


def _nontrivial_rules(cell, family):
    return [
        r for r in family.rules_for(cell)
        if not r.apply(cell).is_trivial_for(cell)
    ]


def normalize(cell, family: RuleFamily, fuel: int = DEFAULT_FUEL, rng=None):
    """The unique terminal set S(cell), as a key -> cell dict.

    Deterministic strategy: lowest-named applicable rule on the canonically
    smallest pending cell.  Passing ``rng`` switches to a randomized
    strategy (any run reaches the same terminal set when the family is
    confluent and terminating; tests exploit this)."""
    terminal = {}
    pending = {}
    heap = []

    def add(c):
        k = c.key()
        if k in terminal or k in pending:
            return
        if family.is_terminal(c):
            terminal[k] = c
        else:
            pending[k] = c
            heapq.heappush(heap, k)

    add(cell)
    moves = 0
    while pending:
        if rng is None:
            while True:
                k = heapq.heappop(heap)
                if k in pending:
                    break
        else:
            k = rng.choice(sorted(pending))
        x = pending.pop(k)
        rules = family.rules_for(x)
        if rng is not None:
            rules = list(rules)
            rng.shuffle(rules)
        sub = None
        for rule in rules:
            cand = rule.apply(x)
            if not cand.is_trivial_for(x):
                sub = cand
                break
        if sub is None:
            terminal[k] = x
            continue
        moves += 1
        if moves > fuel:
            raise FuelExhaustedError(
                f"normalization exceeded {fuel} moves; non-termination "
                "suspected"
            )
        for c in sub.max_cells:
            add(c)
    return terminal


def canonical_subdivision(cell, family: RuleFamily,
                          fuel: int = DEFAULT_FUEL) -> Subdivision:
    """Sigma(cell): the subdivision generated by the terminal set."""
    term = normalize(cell, family, fuel=fuel)
    return Subdivision(tuple(term.values()))


# ---------------------------------------------------------------------------
# Property-test harnesses (honest search, no confluence assumed)
# ---------------------------------------------------------------------------

@dataclass
class HarnessReport:
    checked: int = 0
    joinable: int = 0
    inconclusive: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def inconclusive_rate(self) -> float:
        if self.checked == 0:
            return 0.0
        return len(self.inconclusive) / self.checked

    def summary(self) -> str:
        return (
            f"checked={self.checked} joinable={self.joinable} "
            f"inconclusive={len(self.inconclusive)} "
            f"failures={len(self.failures)}"
        )


def _successors(state, registry, family):
    out = []
    for k in sorted(state):
        cell = registry[k]
        for rule in _nontrivial_rules(cell, family):
            sub = rule.apply(cell)
            nxt = set(state)
            nxt.discard(k)
            new_cells = {c.key(): c for c in sub.max_cells}
            registry.update(new_cells)
            nxt.update(new_cells)
            out.append(frozenset(nxt))
    return out


def joinable(y1_cells, y2_cells, family, depth: int = 6,
             budget: int = 4000):
    """Search for a common descendant of two cell sets.

    Returns True (join found), False (both sides fully explored, no join),
    or None (budget or depth exhausted: inconclusive)."""
    registry = {}
    for c in list(y1_cells) + list(y2_cells):
        registry[c.key()] = c
    s1 = frozenset(c.key() for c in y1_cells)
    s2 = frozenset(c.key() for c in y2_cells)
    seen1, seen2 = {s1}, {s2}
    front1, front2 = [s1], [s2]
    if seen1 & seen2:
        return True
    nodes = 0
    exhausted1 = exhausted2 = False
    for _ in range(depth):
        if front1:
            nxt = []
            for st in front1:
                for succ in _successors(st, registry, family):
                    if succ not in seen1:
                        seen1.add(succ)
                        nxt.append(succ)
                    nodes += 1
                    if nodes > budget:
                        return True if seen1 & seen2 else None
            front1 = nxt
            if seen1 & seen2:
                return True
        else:
            exhausted1 = True
        if front2:
            nxt = []
            for st in front2:
                for succ in _successors(st, registry, family):
                    if succ not in seen2:
                        seen2.add(succ)
                        nxt.append(succ)
                    nodes += 1
                    if nodes > budget:
                        return True if seen1 & seen2 else None
            front2 = nxt
            if seen1 & seen2:
                return True
        else:
            exhausted2 = True
        if exhausted1 and exhausted2:
            return False
    if not front1 and not front2:
        return False
    return None


def check_local_confluence(family: RuleFamily, samples, depth: int = 6,
                           budget: int = 4000) -> HarnessReport:
    """For each sample cell, every pair of single moves must be joinable."""
    report = HarnessReport()
    for x in samples:
        rules = _nontrivial_rules(x, family)
        subs = [rule.apply(x) for rule in rules]
        for i in range(len(subs)):
            for j in range(i + 1, len(subs)):
                report.checked += 1
                res = joinable(
                    subs[i].max_cells, subs[j].max_cells, family,
                    depth=depth, budget=budget,
                )
                if res is True:
                    report.joinable += 1
                elif res is False:
                    report.failures.append(
                        (x.key(), rules[i].name, rules[j].name)
                    )
                else:
                    report.inconclusive.append(
                        (x.key(), rules[i].name, rules[j].name)
                    )
    return report


def check_facial_compatibility(family: RuleFamily, samples, depth: int = 6,
                               budget: int = 4000) -> HarnessReport:
    """Restriction of each move to each face must be joinable with the face;
    terminality must be face-hereditary."""
    report = HarnessReport()
    for x in samples:
        if is_terminal(x, family):
            for y in x.face_list():
                report.checked += 1
                if is_terminal(y, family):
                    report.joinable += 1
                else:
                    report.failures.append((x.key(), "terminal-face", y.key()))
            continue
        for rule in _nontrivial_rules(x, family):
            sub = rule.apply(x)
            for y in x.face_list():
                if y.key() == x.key():
                    continue
                report.checked += 1
                try:
                    restricted = restriction(sub, y)
                except FrameworkViolationError as exc:
                    report.failures.append((x.key(), rule.name, str(exc)))
                    continue
                res = joinable(
                    restricted.max_cells, [y], family,
                    depth=depth, budget=budget,
                )
                if res is True:
                    report.joinable += 1
                elif res is False:
                    report.failures.append((x.key(), rule.name, y.key()))
                else:
                    report.inconclusive.append((x.key(), rule.name, y.key()))
    return report
