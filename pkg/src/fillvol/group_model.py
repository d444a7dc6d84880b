"""Finitely generated groups with word metrics.

Elements are canonical Python values: an ``int`` residue/index for finite
groups and a ``tuple`` of ints for free abelian groups.  Words are sequences
of signed 1-based generator indices (``-2`` is the inverse of generator 2).
The word metric always uses S together with S^-1.
"""

from __future__ import annotations

import itertools
import threading
from collections import deque
from typing import Iterable, Sequence

from .errors import DomainError, RadiusCapError, SchemaError
from .linalg import spans_integer_lattice

DEFAULT_RADIUS_CAP = 64


def _move_order(ngens: int) -> list[int]:
    # +1 < -1 < +2 < -2 < ... ; defines "lexicographically least" words
    return [m for i in range(1, ngens + 1) for m in (i, -i)]


class Group:
    kind = "group"
    is_finite = False

    def __init__(self, generators: Sequence, names: Sequence[str] | None = None):
        self.generators = tuple(self.coerce(g) for g in generators)
        if names is not None and len(names) != len(self.generators):
            raise DomainError("one name per generator required")
        self.names = tuple(names) if names is not None else None

    # -- group structure --------------------------------------------------
    @property
    def identity(self):
        raise NotImplementedError

    def multiply(self, g, h):
        raise NotImplementedError

    def inverse(self, g):
        raise NotImplementedError

    def coerce(self, g):
        raise NotImplementedError

    def elements(self) -> tuple:
        raise DomainError(f"{self} is infinite")

    @property
    def order(self) -> int | None:
        return None

    def _key(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, Group) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def power(self, g, n: int):
        base = g if n >= 0 else self.inverse(g)
        out = self.identity
        for _ in range(abs(n)):
            out = self.multiply(out, base)
        return out

    def generator_move(self, m: int):
        s = self.generators[abs(m) - 1]
        return s if m > 0 else self.inverse(s)

    def evaluate_word(self, word: Iterable[int]):
        g = self.identity
        for m in word:
            if not isinstance(m, int) or m == 0 or abs(m) > len(self.generators):
                raise DomainError(f"bad generator index {m!r} in word")
            g = self.multiply(g, self.generator_move(m))
        return g

    # -- metric -----------------------------------------------------------
    def word_length(self, g) -> int:
        raise NotImplementedError

    def distance(self, g, h) -> int:
        return self.word_length(self.multiply(self.inverse(g), h))

    def word_for(self, g) -> list[int]:
        """Lexicographically least shortest word representing ``g``."""
        raise NotImplementedError

    def path(self, g, h) -> list[int]:
        """Generator moves of the lexicographically least geodesic from g to h."""
        return self.word_for(self.multiply(self.inverse(g), h))

    def ball(self, radius: int) -> list:
        raise NotImplementedError

    def to_spec(self) -> dict:
        raise NotImplementedError

    def element_to_json(self, g):
        return g

    def element_from_json(self, v):
        return self.coerce(v)

    def _spec_generators(self, spec: dict) -> dict:
        spec["generators"] = [self.element_to_json(g) for g in self.generators]
        if self.names is not None:
            spec["names"] = list(self.names)
        return spec

    def generator_label(self, idx: int) -> str:
        if self.names is not None:
            return self.names[idx]
        return str(idx + 1)

    def __repr__(self):
        return f"{type(self).__name__}({self.to_spec()})"


class FiniteGroup(Group):
    """Finite group on ``range(order)`` given by a multiplication table."""

    is_finite = True

    def __init__(self, table: Sequence[Sequence[int]], generators: Sequence, names=None):
        self._table = tuple(tuple(r) for r in table)
        n = len(self._table)
        if n == 0 or any(len(r) != n for r in self._table):
            raise DomainError("multiplication table must be square and nonempty")
        if any(not isinstance(v, int) or not 0 <= v < n for r in self._table for v in r):
            raise DomainError("multiplication table is not closed")
        ident = [e for e in range(n) if all(self._table[e][a] == a == self._table[a][e] for a in range(n))]
        if not ident:
            raise DomainError("no identity element")
        self._identity = ident[0]
        inv = []
        for a in range(n):
            cands = [b for b in range(n) if self._table[a][b] == self._identity]
            if not cands:
                raise DomainError(f"element {a} has no inverse")
            inv.append(cands[0])
        self._inverse = tuple(inv)
        T = self._table
        for a, b, c in itertools.product(range(n), repeat=3):
            if T[T[a][b]][c] != T[a][T[b][c]]:
                raise DomainError("multiplication is not associative")
        super().__init__(generators, names)
        self._build_metric()

    def _build_metric(self):
        n = len(self._table)
        dist = [-1] * n
        word: list[list[int] | None] = [None] * n
        e = self._identity
        dist[e], word[e] = 0, []
        queue = deque([e])
        moves = [(m, self.generator_move(m)) for m in _move_order(len(self.generators))]
        while queue:
            g = queue.popleft()
            for m, s in moves:
                h = self._table[g][s]
                if dist[h] < 0:
                    dist[h] = dist[g] + 1
                    word[h] = word[g] + [m]
                    queue.append(h)
        if any(d < 0 for d in dist):
            raise DomainError("generators do not generate the group")
        self._dist = tuple(dist)
        self._words = tuple(tuple(w) for w in word)

    @property
    def identity(self):
        return self._identity

    @property
    def order(self) -> int:
        return len(self._table)

    def multiply(self, g, h):
        return self._table[g][h]

    def inverse(self, g):
        return self._inverse[g]

    def coerce(self, g):
        if isinstance(g, list) and len(g) == 1:
            g = g[0]
        if isinstance(g, bool) or not isinstance(g, int) or not 0 <= g < len(self._table):
            raise DomainError(f"{g!r} is not an element of {type(self).__name__}")
        return g

    def elements(self) -> tuple:
        return tuple(range(len(self._table)))

    def word_length(self, g) -> int:
        return self._dist[g]

    def word_for(self, g) -> list[int]:
        return list(self._words[g])

    def ball(self, radius: int) -> list:
        return [g for g in range(len(self._table)) if self._dist[g] <= radius]

    def _key(self):
        return ("finite", self._table, self.generators)

    def to_spec(self) -> dict:
        return self._spec_generators({"kind": "finite_table", "table": [list(r) for r in self._table]})


class TrivialGroup(FiniteGroup):
    kind = "trivial"

    def __init__(self):
        super().__init__([[0]], [])

    def _key(self):
        return ("trivial",)

    def to_spec(self) -> dict:
        return {"kind": "trivial"}


class CyclicGroup(FiniteGroup):
    """Z/k written multiplicatively with t = 1; element j stands for t^j."""

    kind = "cyclic"

    def __init__(self, k: int, generators: Sequence | None = None, names=None):
        if isinstance(k, bool) or not isinstance(k, int) or k < 1:
            raise DomainError(f"cyclic order must be >= 1, got {k!r}")
        self.k = k
        table = [[(a + b) % k for b in range(k)] for a in range(k)]
        if generators is None:
            generators = [1 % k] if k > 1 else []
            if names is None and k > 1:
                names = ["t"]
        super().__init__(table, generators, names)

    def coerce(self, g):
        if isinstance(g, list) and len(g) == 1:
            g = g[0]
        if isinstance(g, bool) or not isinstance(g, int):
            raise DomainError(f"{g!r} is not an element of Z/{self.k}")
        return g % self.k

    def multiply(self, g, h):
        return (g + h) % self.k

    def inverse(self, g):
        return (-g) % self.k

    def _key(self):
        return ("cyclic", self.k, self.generators)

    def element_to_json(self, g):
        return [g]

    def to_spec(self) -> dict:
        return self._spec_generators({"kind": "cyclic", "k": self.k})


class FreeAbelianGroup(Group):
    """Z^n with any finite generating set.

    For the standard basis the word length is the l1 norm.  Otherwise it is
    found by breadth first search, memoised up to ``radius_cap``.
    """

    kind = "free_abelian"

    def __init__(self, rank: int, generators: Sequence | None = None, names=None,
                 radius_cap: int = DEFAULT_RADIUS_CAP):
        if isinstance(rank, bool) or not isinstance(rank, int) or rank < 1:
            raise DomainError(f"rank must be >= 1, got {rank!r}")
        self.rank = rank
        self.radius_cap = radius_cap
        if generators is None:
            generators = [tuple(int(i == j) for j in range(rank)) for i in range(rank)]
            if names is None and rank <= 3:
                names = ["x", "y", "z"][:rank]
        super().__init__(generators, names)
        if not spans_integer_lattice([list(g) for g in self.generators], rank):
            raise DomainError("generators do not generate Z^%d" % rank)
        units = {tuple(int(i == j) for j in range(rank)) for i in range(rank)}
        signed = {g for g in self.generators} | {self.inverse(g) for g in self.generators}
        self.standard = signed == units | {self.inverse(u) for u in units}
        self._lock = threading.Lock()
        self._dist: dict = {self.identity: 0}
        self._words: dict = {self.identity: ()}
        self._frontier = [self.identity]
        self._radius_done = 0

    def __getstate__(self):
        state = dict(self.__dict__)
        state.pop("_lock", None)
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()

    @property
    def identity(self):
        return (0,) * self.rank

    def multiply(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def inverse(self, g):
        return tuple(-a for a in g)

    def coerce(self, g):
        if isinstance(g, (list, tuple)) and len(g) == self.rank and all(
            isinstance(a, int) and not isinstance(a, bool) for a in g
        ):
            return tuple(g)
        raise DomainError(f"{g!r} is not an element of Z^{self.rank}")

    def element_to_json(self, g):
        return list(g)

    def _grow(self, radius: int) -> None:
        if radius > self.radius_cap:
            raise RadiusCapError(f"word-length search radius {radius} exceeds cap {self.radius_cap}")
        with self._lock:
            moves = [(m, self.generator_move(m)) for m in _move_order(len(self.generators))]
            while self._radius_done < radius:
                nxt = []
                for g in self._frontier:
                    wg = self._words[g]
                    for m, s in moves:
                        h = self.multiply(g, s)
                        if h not in self._dist:
                            self._dist[h] = self._radius_done + 1
                            self._words[h] = wg + (m,)
                            nxt.append(h)
                self._frontier = nxt
                self._radius_done += 1

    def word_length(self, g) -> int:
        if self.standard:
            return sum(abs(a) for a in g)
        d = self._dist.get(g)
        while d is None:
            self._grow(self._radius_done + 1)
            d = self._dist.get(g)
        return d

    def word_for(self, g) -> list[int]:
        if self.standard:
            word = []
            for i, a in enumerate(g):
                unit = tuple(int(i == j) for j in range(self.rank))
                idx = self.generators.index(unit) + 1 if unit in self.generators else -(
                    self.generators.index(self.inverse(unit)) + 1)
                word.extend([idx if a > 0 else -idx] * abs(a))
            # generator index order decides lexicographic order, not coordinate order
            return sorted(word, key=lambda m: (abs(m), m < 0))
        self.word_length(g)
        return list(self._words[g])

    def ball(self, radius: int) -> list:
        if radius < 0:
            return []
        if self.standard:
            out = []
            for v in itertools.product(range(-radius, radius + 1), repeat=self.rank):
                if sum(abs(a) for a in v) <= radius:
                    out.append(tuple(v))
            return sorted(out)
        self._grow(radius)
        return sorted(g for g, d in self._dist.items() if d <= radius)

    def _key(self):
        return ("free_abelian", self.rank, self.generators)

    def to_spec(self) -> dict:
        return self._spec_generators({"kind": "free_abelian", "n": self.rank})


def group_from_spec(spec: dict) -> Group:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise SchemaError(f"group must be a tagged record, got {spec!r}")
    kind = spec["kind"]
    gens = spec.get("generators")
    names = spec.get("names")
    try:
        if kind == "trivial":
            return TrivialGroup()
        if kind == "cyclic":
            return CyclicGroup(int(spec["k"]), gens, names)
        if kind == "free_abelian":
            n = int(spec.get("n", spec.get("rank", 0)))
            return FreeAbelianGroup(n, gens, names, spec.get("radius_cap", DEFAULT_RADIUS_CAP))
        if kind == "finite_table":
            if gens is None:
                raise SchemaError("finite_table group needs generators")
            return FiniteGroup(spec["table"], gens, names)
    except KeyError as exc:
        raise SchemaError(f"group record missing field {exc}") from exc
    raise SchemaError(f"unknown group kind {kind!r}")


def klein_four() -> FiniteGroup:
    """Z/2 x Z/2 on {0, a=1, b=2, ab=3} with generators a, b."""
    table = [[a ^ b for b in range(4)] for a in range(4)]
    return FiniteGroup(table, [1, 2], ["a", "b"])
