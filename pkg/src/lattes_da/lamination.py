"""Symbolic Cantor x interval laminations: suspensions of Cantor-set maps.

A leaf of the suspension of ``g: C -> C`` is the flow line through a base
point, so it is identified with the two-sided ``g``-orbit of that point.
Density is tested at finite resolution: a leaf is depth-``k`` dense when
its orbit visits every depth-``k`` cylinder.

Two systems are modelled.  The full shift on ``{0,1}`` and a homeomorphism
``h`` of the middle-thirds Cantor set (addresses over ``{0,2}``) carrying
``C n [0,1/9]`` onto ``C n [0,1/3]`` and ``C n [2/9,1]`` onto
``C n [2/3,1]`` in the order-preserving way::

    00w -> 0w      02w -> 20w      2w -> 22w
"""

from __future__ import annotations

import itertools
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence


class InsufficientDepth(ValueError):
    pass


Word = tuple[int, ...]


@dataclass(frozen=True)
class CylinderAddress:
    word: Word
    alphabet: Word = (0, 2)

    def __post_init__(self) -> None:
        object.__setattr__(self, "word", tuple(int(s) for s in self.word))
        bad = set(self.word) - set(self.alphabet)
        if bad:
            raise ValueError(f"symbols {sorted(bad)} not in alphabet {self.alphabet}")

    @property
    def depth(self) -> int:
        return len(self.word)

    def __str__(self) -> str:
        return "".join(map(str, self.word))


@dataclass(frozen=True)
class Rule:
    """Prefix rewriting ``pattern + w -> replacement + w``."""

    pattern: Word
    replacement: Word

    def __str__(self) -> str:
        p = "".join(map(str, self.pattern))
        r = "".join(map(str, self.replacement))
        return f"{p}w->{r}w"


@dataclass(frozen=True)
class CantorSystem:
    name: str
    alphabet: Word
    rules: tuple[Rule, ...]
    inverse_rules: tuple[Rule, ...] = ()

    def __post_init__(self) -> None:
        for table in (self.rules, self.inverse_rules):
            pats = [r.pattern for r in table]
            for p, q in itertools.permutations(pats, 2):
                if q[: len(p)] == p:
                    raise ValueError(f"{self.name}: overlapping rule patterns {p} and {q}")

    @property
    def invertible(self) -> bool:
        return bool(self.inverse_rules)

    @property
    def lookahead(self) -> int:
        return max(len(r.pattern) for r in self.rules + self.inverse_rules)

    def match(self, word: Sequence[int], inverse: bool = False) -> Rule:
        """The unique rule whose pattern is a prefix of ``word``."""
        table = self.inverse_rules if inverse else self.rules
        word = tuple(word)
        for rule in table:
            if word[: len(rule.pattern)] == rule.pattern:
                return rule
        raise InsufficientDepth(f"{self.name}: no rule matches address {''.join(map(str, word))!r}")

    def cylinders(self, k: int) -> list[Word]:
        return list(itertools.product(self.alphabet, repeat=k))


H_SYSTEM = CantorSystem(
    "h",
    (0, 2),
    (Rule((0, 0), (0,)), Rule((0, 2), (2, 0)), Rule((2,), (2, 2))),
    (Rule((0,), (0, 0)), Rule((2, 0), (0, 2)), Rule((2, 2), (2,))),
)
SHIFT_SYSTEM = CantorSystem("shift", (0, 1), (Rule((0,), ()), Rule((1,), ())))
TRIVIAL_SYSTEM = CantorSystem("trivial", (0,), (Rule((0,), ()),))
SYSTEMS = {"h": H_SYSTEM, "shift": SHIFT_SYSTEM, "trivial": TRIVIAL_SYSTEM}


def _rewrite(system: CantorSystem, word: Word, inverse: bool = False) -> Word:
    rule = system.match(word, inverse)
    return rule.replacement + word[len(rule.pattern):]


def h_apply(addr: CylinderAddress) -> CylinderAddress:
    """Apply ``h`` to a finite address; depth changes by -1, 0 or +1."""
    return CylinderAddress(_rewrite(H_SYSTEM, addr.word), H_SYSTEM.alphabet)


def h_inverse_apply(addr: CylinderAddress) -> CylinderAddress:
    return CylinderAddress(_rewrite(H_SYSTEM, addr.word, inverse=True), H_SYSTEM.alphabet)


# --- infinite points ---------------------------------------------------------


@dataclass(frozen=True)
class SymbolicPoint:
    """The eventually periodic word ``prefix + cycle + cycle + ...``."""

    prefix: Word
    cycle: Word

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "cycle", tuple(self.cycle))
        if not self.cycle:
            raise ValueError("cycle must be nonempty")

    def take(self, n: int) -> Word:
        out = list(self.prefix[:n])
        i = 0
        while len(out) < n:
            out.append(self.cycle[i % len(self.cycle)])
            i += 1
        return tuple(out)

    def value(self) -> Fraction:
        """Position in ``[0, 1]`` reading the symbols as base-``b`` digits,
        ``b = 3`` for ternary addresses and ``b = 2`` otherwise."""
        base = 3 if 2 in self.prefix + self.cycle else 2
        head = sum(Fraction(s, base ** (i + 1)) for i, s in enumerate(self.prefix))
        n = len(self.cycle)
        block = sum(Fraction(s, base ** (i + 1)) for i, s in enumerate(self.cycle))
        tail = block * Fraction(base**n, base**n - 1)
        return head + tail / base ** len(self.prefix)

    def __str__(self) -> str:
        p = "".join(map(str, self.prefix))
        c = "".join(map(str, self.cycle))
        return f"{p}({c})^inf"


class _Cursor:
    """Mutable view of a symbolic point with cheap prefix edits.

    The explicit head is stored reversed, so its first symbol is
    ``head[-1]`` and edits happen at the end of a list.
    """

    def __init__(self, point: SymbolicPoint):
        self.head: list[int] = list(reversed(point.prefix))
        self.cycle = point.cycle
        self.phase = 0

    def peek(self, n: int) -> Word:
        h = self.head
        if len(h) >= n:
            return tuple(reversed(h[len(h) - n :]))
        out = h[::-1]
        i = self.phase
        while len(out) < n:
            out.append(self.cycle[i % len(self.cycle)])
            i += 1
        return tuple(out)

    def drop(self, n: int) -> None:
        h = self.head
        take = min(n, len(h))
        if take:
            del h[len(h) - take :]
        self.phase = (self.phase + n - take) % len(self.cycle)

    def push(self, symbols: Word) -> None:
        self.head.extend(reversed(symbols))

    def step(self, system: CantorSystem, inverse: bool = False) -> None:
        rule = _rule_table(system, inverse)[self.peek(system.lookahead)]
        self.drop(len(rule.pattern))
        self.push(rule.replacement)

    def leading(self, symbol: int, cap: int) -> int:
        """Length of the initial run of ``symbol``, at most ``cap``."""
        n = 0
        for s in reversed(self.head):
            if s != symbol:
                return n
            n += 1
            if n >= cap:
                return cap
        if all(c == symbol for c in self.cycle):
            return cap
        i = self.phase
        while self.cycle[i % len(self.cycle)] == symbol:
            n += 1
            i += 1
        return min(n, cap)

    def snapshot(self) -> SymbolicPoint:
        c = self.cycle[self.phase:] + self.cycle[: self.phase]
        return SymbolicPoint(tuple(reversed(self.head)), c)


_TABLES: dict = {}


def _rule_table(system: CantorSystem, inverse: bool) -> dict[Word, Rule]:
    """Rule lookup keyed by every word of the lookahead length."""
    key = (system, inverse)
    if key not in _TABLES:
        _TABLES[key] = {
            w: system.match(w, inverse)
            for w in itertools.product(system.alphabet, repeat=system.lookahead)
        }
    return _TABLES[key]


def orbit_point(system: CantorSystem, point: SymbolicPoint, n: int) -> SymbolicPoint:
    """``g^n(point)``; negative ``n`` uses the inverse rules."""
    cur = _Cursor(point)
    for _ in range(abs(n)):
        cur.step(system, inverse=n < 0)
    return cur.snapshot()


def shift_apply(window):
    """Left shift.  A finite window loses its first symbol; a
    :class:`SymbolicPoint` is shifted exactly."""
    if isinstance(window, SymbolicPoint):
        return orbit_point(SHIFT_SYSTEM, window, 1)
    window = tuple(window)
    if len(window) < 1:
        raise ValueError("window must have length >= 1")
    return window[1:]


def de_bruijn(k: int, alphabet: Word = (0, 1)) -> Word:
    """Cyclic de Bruijn word of order ``k`` (Fredricksen-Kessler-Maiorana)."""
    n = len(alphabet)
    a = [0] * (k + 1)
    out: list[int] = []

    def gen(t: int, p: int) -> None:
        if t > k:
            if k % p == 0:
                out.extend(a[1 : p + 1])
            return
        a[t] = a[t - p]
        gen(t + 1, p)
        for j in range(a[t - p] + 1, n):
            a[t] = j
            gen(t + 1, t)

    gen(1, 1)
    return tuple(alphabet[i] for i in out)


def de_bruijn_point(k: int, alphabet: Word = (0, 1)) -> SymbolicPoint:
    return SymbolicPoint((), de_bruijn(k, alphabet))


# --- leaves ------------------------------------------------------------------------


@dataclass(frozen=True)
class LeafItinerary:
    """Depth-``depth`` cylinders visited by the forward orbit of ``base``."""

    system: CantorSystem
    base: SymbolicPoint
    depth: int
    log: tuple[Word, ...]

    def validate(self) -> bool:
        """Replay the orbit and compare with the log."""
        return itinerary(self.system, self.base, self.depth, len(self.log) - 1).log == self.log

    def visits(self) -> Counter:
        return Counter(self.log)


def itinerary(system: CantorSystem, base: SymbolicPoint, depth: int, steps: int) -> LeafItinerary:
    cur = _Cursor(base)
    log = [cur.peek(depth)]
    for _ in range(steps):
        cur.step(system)
        log.append(cur.peek(depth))
    return LeafItinerary(system, base, depth, tuple(log))


def _growing_runs(system: CantorSystem, inverse: bool) -> frozenset[int]:
    """Symbols ``s`` whose rule on ``s^L`` consumes only ``s`` and writes at
    least as many ``s``: a leading ``s``-run of length ``>= L`` never shrinks."""
    table = _rule_table(system, inverse)
    out = set()
    for s in system.alphabet:
        rule = table[(s,) * system.lookahead]
        if set(rule.pattern) == {s} and set(rule.replacement) == {s} and len(rule.replacement) >= len(rule.pattern):
            out.add(s)
    return frozenset(out)


def _count_visits(
    system: CantorSystem, cur: _Cursor, depth: int, steps: int, visits: Counter, inverse: bool = False, stop: int = 0
) -> bool:
    """Add the cylinders of ``steps + 1`` consecutive orbit points to ``visits``.

    Once the orbit enters a run that can never shrink, every later window
    is the same and the remaining steps are credited in one go.  Returns
    True if ``stop`` distinct cylinders were reached (``stop=0`` disables).
    """
    runs = _growing_runs(system, inverse)
    reach = depth + system.lookahead
    for i in range(steps + 1):
        w = cur.peek(depth)
        first = w[0]
        if first in runs and w.count(first) == depth and cur.leading(first, reach) >= reach:
            visits[w] += steps + 1 - i
            return bool(stop) and len(visits) >= stop
        visits[w] += 1
        if stop and len(visits) >= stop:
            return True
        if i < steps:
            cur.step(system, inverse)
    return False


def two_sided_visits(system: CantorSystem, base: SymbolicPoint, depth: int, steps: int) -> Counter:
    """Cylinder visits of ``g^n(base)`` for ``|n| <= steps``."""
    visits: Counter = Counter()
    _count_visits(system, _Cursor(base), depth, steps, visits)
    if system.invertible:
        cur = _Cursor(base)
        cur.step(system, inverse=True)
        _count_visits(system, cur, depth, steps - 1, visits, inverse=True)
    return visits


@dataclass(frozen=True)
class HCertificate:
    """Exhaustive bound on cylinder coverage by ``h``-orbits at depth ``k``.

    Every point other than the fixed points ``0^inf`` and ``2^inf`` lies on
    the orbit of exactly one point ``02w``, and the depth-``k`` cylinders
    that orbit meets depend only on ``w[:k-2]``.  ``classes`` enumerates
    those prefixes (plus the two fixed points) and records how many
    cylinders each two-sided orbit visits.
    """

    depth: int
    horizon: int
    classes: int
    max_visited: int
    cylinders: int
    best_seed: SymbolicPoint

    @property
    def no_dense_leaf(self) -> bool:
        return self.max_visited < self.cylinders


def h_orbit_certificate(k: int, horizon: int = 10_000) -> HCertificate:
    if k < 2:
        raise InsufficientDepth("the certificate needs depth >= 2")
    if horizon < k:
        raise ValueError("horizon must be at least the depth")
    seeds = [SymbolicPoint((0,), (0,)), SymbolicPoint((2,), (2,))]
    for w in itertools.product((0, 2), repeat=k - 2):
        seeds.append(SymbolicPoint((0, 2) + w, (0,)))
    best, best_seed = -1, seeds[0]
    for s in seeds:
        n = len(two_sided_visits(H_SYSTEM, s, k, horizon))
        if n > best:
            best, best_seed = n, s
    return HCertificate(k, horizon, len(seeds), best, 2**k, best_seed)


@dataclass(frozen=True)
class DenseLeafVerdict:
    found: bool
    depth: int
    horizon: int
    seed: SymbolicPoint | None
    visits: Counter = field(default_factory=Counter)
    seeds_tried: int = 0
    reason: str = ""

    def __str__(self) -> str:
        if self.found:
            return f"dense_leaf_found(seed={self.seed}) depth={self.depth} horizon={self.horizon}"
        return f"not_found depth={self.depth} horizon={self.horizon} seeds={self.seeds_tried}"


def dense_leaf_search(
    system: CantorSystem, k: int, horizon: int, seeds: Iterable[SymbolicPoint]
) -> DenseLeafVerdict:
    """First seed whose forward itinerary meets every depth-``k`` cylinder
    within ``horizon`` steps."""
    if k < 1:
        raise ValueError("depth must be >= 1")
    n_cyl = len(system.alphabet) ** k
    if horizon < n_cyl:
        raise ValueError(f"horizon {horizon} is below the {n_cyl} cylinders at depth {k}")
    seeds = list(seeds)
    if len(system.alphabet) < 2:
        return DenseLeafVerdict(
            False, k, horizon, None, seeds_tried=len(seeds),
            reason="one-symbol base is a point, not a Cantor set; its suspension is a single closed leaf",
        )
    best = Counter()
    best_seed = None
    for s in seeds:
        visits: Counter = Counter()
        if _count_visits(system, _Cursor(s), k, horizon, visits, stop=n_cyl):
            return DenseLeafVerdict(True, k, horizon, s, visits, len(seeds))
        if len(visits) > len(best):
            best, best_seed = visits, s
    return DenseLeafVerdict(False, k, horizon, best_seed, best, len(seeds))


def depth_seeds(system: CantorSystem, d: int) -> list[SymbolicPoint]:
    """Every depth-``d`` word, continued by the last alphabet symbol forever."""
    tail = (system.alphabet[-1],)
    return [SymbolicPoint(w, tail) for w in itertools.product(system.alphabet, repeat=d)]


def default_seeds(system: CantorSystem, k: int) -> list[SymbolicPoint]:
    if system is SHIFT_SYSTEM:
        return [de_bruijn_point(k)]
    return depth_seeds(system, max(k, 8) if system is H_SYSTEM else k)


@dataclass(frozen=True)
class IndecomposabilityVerdict:
    label: str
    depth: int
    horizon: int
    exhaustive: bool
    search: DenseLeafVerdict
    certificate: HCertificate | None = None

    @property
    def indecomposable(self) -> bool:
        return self.label.startswith("consistent")

    def __str__(self) -> str:
        kind = "exhaustive" if self.exhaustive else "finite-resolution"
        return f"{self.label}({self.depth}) [{kind}, horizon={self.horizon}]"


def indecomposability_verdict(
    system: CantorSystem, k: int, horizon: int, seeds: Iterable[SymbolicPoint] | None = None
) -> IndecomposabilityVerdict:
    """Finite-resolution verdict: a depth-``k`` dense leaf is evidence of
    indecomposability; its absence is evidence against, and a proof only
    when backed by an exhaustive certificate (available for ``h``)."""
    seeds = default_seeds(system, k) if seeds is None else list(seeds)
    search = dense_leaf_search(system, k, horizon, seeds)
    if search.found:
        return IndecomposabilityVerdict("consistent_with_indecomposable", k, horizon, False, search)
    cert = None
    exhaustive = False
    if system is H_SYSTEM:
        cert = h_orbit_certificate(k, horizon)
        exhaustive = cert.no_dense_leaf
    elif len(system.alphabet) < 2:
        exhaustive = True
    return IndecomposabilityVerdict("no_dense_leaf_detected", k, horizon, exhaustive, search, cert)


# --- structural checks on h ------------------------------------------------------------


def h_injectivity_check(d: int) -> bool:
    """Distinct depth-``d`` words in one rule cylinder have distinct images."""
    by_rule: dict[Rule, set] = {}
    for w in itertools.product((0, 2), repeat=d):
        try:
            rule = H_SYSTEM.match(w)
        except InsufficientDepth:
            continue
        image = h_apply(CylinderAddress(w)).word
        seen = by_rule.setdefault(rule, set())
        if image in seen:
            return False
        seen.add(image)
    return True


def h_order_check(d: int) -> bool:
    """``h`` is strictly increasing on the endpoints of all depth-``d`` cylinders.

    The left and right endpoints of ``[w]`` are ``w0^inf`` and ``w2^inf``.
    """
    pts = []
    for w in itertools.product((0, 2), repeat=d):
        pts.append(SymbolicPoint(w, (0,)))
        pts.append(SymbolicPoint(w, (2,)))
    pts = sorted(set(pts), key=SymbolicPoint.value)
    values = [orbit_point(H_SYSTEM, p, 1).value() for p in pts]
    return all(a < b for a, b in zip(values, values[1:]))


def leading_twos_profile(seed: SymbolicPoint, steps: int, cap: int | None = None) -> list[int]:
    """Number of leading 2s along the forward ``h``-orbit of ``seed``.

    Only the first two symbols are rewritten, so the run length is updated
    from the rule that fired: ``2w -> 22w`` adds one, ``02w -> 20w`` leaves
    exactly one and ``00w -> 0w`` leaves none.
    """
    cap = steps + len(seed.prefix) + 1 if cap is None else cap
    cur = _Cursor(seed)
    n = cur.leading(2, cap)
    out = [n]
    for _ in range(steps):
        rule = _rule_table(H_SYSTEM, False)[cur.peek(H_SYSTEM.lookahead)]
        cur.drop(len(rule.pattern))
        cur.push(rule.replacement)
        n = {(2,): min(n + 1, cap), (0, 2): 1, (0, 0): 0}[rule.pattern]
        out.append(n)
    return out


def visits_csv(system: CantorSystem, k: int, visits: Counter) -> str:
    lines = ["cylinder,visits"]
    for c in system.cylinders(k):
        lines.append(f"{''.join(map(str, c))},{visits.get(c, 0)}")
    return "\n".join(lines) + "\n"
