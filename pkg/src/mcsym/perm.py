"""Finite permutations over context-qualified atoms.

Atoms are qualified by the integer id of the context whose alphabet declares
them, so alphabets of different contexts are disjoint by construction.  A
:class:`Permutation` carries an explicit finite domain; atoms outside the
domain are treated as untouched by :func:`apply`, but two permutations with
different domains are *different values* even if they move the same atoms.
That distinction matters for the join: ``join(pi, sigma)`` is a partial
operation and its definedness depends on the domains, not just the supports.

The join of two permutations is defined iff they agree on the intersection of
their domains; the united mapping is then automatically a bijection of the
united domain (every element keeps a preimage, and a surjective self-map of a
finite set is injective).  Undefinedness is an ordinary return value
(``None``), not an exception: callers routinely probe many joins and keep the
defined ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import BoundExceeded, InternalError, ParseError


@dataclass(frozen=True, order=True)
class Atom:
    """An atom qualified by the id of the declaring context."""

    context_id: int
    name: str

    def __str__(self) -> str:
        return self.name

    def qualified(self) -> str:
        return f"{self.context_id}.{self.name}"


class Permutation:
    """An immutable bijection of a finite set of atoms onto itself."""

    __slots__ = ("_domain", "_map", "_hash")

    def __init__(self, mapping: Mapping[Atom, Atom], domain: Iterable[Atom] | None = None):
        m = dict(mapping)
        dom = frozenset(m) if domain is None else frozenset(domain)
        if not set(m) <= dom:
            raise InternalError("permutation maps atoms outside its domain")
        for a in dom:
            m.setdefault(a, a)
        if not set(m.values()) <= dom:
            raise InternalError("permutation image leaves its domain")
        if len(set(m.values())) != len(m):
            raise InternalError("permutation mapping is not injective")
        object.__setattr__(self, "_domain", dom)
        object.__setattr__(self, "_map", m)
        object.__setattr__(self, "_hash", hash((dom, frozenset((a, b) for a, b in m.items() if a != b))))

    @classmethod
    def identity(cls, domain: Iterable[Atom]) -> "Permutation":
        return cls({}, domain=domain)

    @property
    def domain(self) -> frozenset[Atom]:
        return self._domain

    @property
    def support(self) -> frozenset[Atom]:
        return frozenset(a for a, b in self._map.items() if a != b)

    def is_identity(self) -> bool:
        return all(a == b for a, b in self._map.items())

    def __call__(self, atom: Atom) -> Atom:
        return self._map.get(atom, atom)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Permutation is immutable")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return self._domain == other._domain and self._map == other._map

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        body = emit_cycles(self) or "()"
        return f"Permutation({body} on {len(self._domain)} atoms)"

    def inverse(self) -> "Permutation":
        return Permutation({b: a for a, b in self._map.items()}, domain=self._domain)

    def extend(self, domain: Iterable[Atom]) -> "Permutation":
        """The same mapping viewed on a larger domain (new atoms are fixed)."""
        dom = self._domain | frozenset(domain)
        return Permutation(self._map, domain=dom)

    def cycles(self) -> list[tuple[Atom, ...]]:
        """Nontrivial cycles in canonical form.

        Each cycle starts at its least atom; cycles are sorted by that atom.
        """
        seen: set[Atom] = set()
        out: list[tuple[Atom, ...]] = []
        for start in sorted(self._domain):
            if start in seen or self._map[start] == start:
                seen.add(start)
                continue
            cyc = [start]
            seen.add(start)
            nxt = self._map[start]
            while nxt != start:
                cyc.append(nxt)
                seen.add(nxt)
                nxt = self._map[nxt]
            out.append(tuple(cyc))
        return out


def apply(pi: Permutation, obj):
    """Apply ``pi`` to an atom or, structurally, to a compound value.

    Sets and tuples map elementwise (preserving their type); other objects may
    opt in by providing ``_apply_perm``.  Atoms outside the domain are fixed.
    """
    if isinstance(obj, Atom):
        return pi(obj)
    if isinstance(obj, (frozenset, set)):
        return type(obj)(apply(pi, x) for x in obj)
    if isinstance(obj, tuple):
        return tuple(apply(pi, x) for x in obj)
    if hasattr(obj, "_apply_perm"):
        return obj._apply_perm(pi)
    raise InternalError(f"cannot apply a permutation to {type(obj).__name__}")


def compose(pi: Permutation, sigma: Permutation) -> Permutation:
    """The permutation acting as ``pi`` first, then ``sigma``.

    Domains are united; each factor fixes atoms outside its own domain.
    """
    dom = pi.domain | sigma.domain
    return Permutation({a: sigma(pi(a)) for a in dom}, domain=dom)


def join(pi: Permutation, sigma: Permutation) -> Permutation | None:
    """Unite two permutations, or ``None`` where the join is undefined.

    Defined iff ``pi`` and ``sigma`` agree on the intersection of their
    domains; the result acts like both factors, on the united domain.
    """
    for a in pi.domain & sigma.domain:
        if pi(a) != sigma(a):
            return None
    merged = {a: pi(a) for a in pi.domain}
    merged.update((a, sigma(a)) for a in sigma.domain)
    return Permutation(merged)


def join_sets(pis: Iterable[Permutation], sigmas: Iterable[Permutation]) -> frozenset[Permutation]:
    """All defined pairwise joins between two sets of permutations."""
    sigmas = list(sigmas)
    out: set[Permutation] = set()
    for p in pis:
        for s in sigmas:
            j = join(p, s)
            if j is not None:
                out.add(j)
    return frozenset(out)


def orbit(perms: Iterable[Permutation] | Permutation, atom: Atom) -> frozenset[Atom]:
    """The orbit of ``atom`` under a permutation or a set of permutations."""
    gens = [perms] if isinstance(perms, Permutation) else list(perms)
    if gens and not any(atom in g.domain for g in gens):
        raise InternalError(f"{atom.qualified()} is outside the permutation domain")
    seen = {atom}
    frontier = [atom]
    while frontier:
        a = frontier.pop()
        for g in gens:
            b = g(a)
            if b not in seen:
                seen.add(b)
                frontier.append(b)
    return frozenset(seen)


def orbit_of_states(perms: Iterable[Permutation] | Permutation, state) -> frozenset:
    """The orbit of a hashable compound value (e.g. a belief state)."""
    gens = [perms] if isinstance(perms, Permutation) else list(perms)
    seen = {state}
    frontier = [state]
    while frontier:
        s = frontier.pop()
        for g in gens:
            t = apply(g, s)
            if t not in seen:
                seen.add(t)
                frontier.append(t)
    return frozenset(seen)


def group_closure(gens: Iterable[Permutation], cap: int = 10**6) -> frozenset[Permutation]:
    """Close a generator set under composition (domains united first).

    Raises :class:`BoundExceeded` when the closure would exceed ``cap``
    elements.
    """
    gens = list(gens)
    dom: frozenset[Atom] = frozenset()
    for g in gens:
        dom |= g.domain
    aligned = [g.extend(dom) for g in gens]
    ident = Permutation.identity(dom)
    group = {ident}
    frontier = [ident]
    while frontier:
        p = frontier.pop()
        for g in aligned:
            q = compose(p, g)
            if q not in group:
                if len(group) >= cap:
                    raise BoundExceeded(f"group closure exceeds cap of {cap}")
                group.add(q)
                frontier.append(q)
    return frozenset(group)


def _gen_sort_key(p: Permutation) -> tuple[int, str]:
    return (len(p.support), emit_cycles(p))


def reduce_irredundant(gens: Iterable[Permutation], cap: int = 10**6) -> list[Permutation]:
    """A subset of ``gens`` generating the same group, from which no single
    generator can be dropped.

    Greedy: repeatedly drop one generator whose removal preserves the closure,
    preferring to drop large-support generators.  The result is sorted by
    ascending support size (ties by cycle notation).
    """
    pool = [g for g in dict.fromkeys(gens) if not g.is_identity()]
    if not pool:
        return []
    target = group_closure(pool, cap=cap)
    changed = True
    while changed and len(pool) > 1:
        changed = False
        for g in sorted(pool, key=_gen_sort_key, reverse=True):
            rest = [h for h in pool if h != g]
            if group_closure(rest, cap=cap) == target:
                pool = rest
                changed = True
                break
    return sorted(pool, key=_gen_sort_key)


def emit_cycles(pi: Permutation) -> str:
    """Canonical cycle notation; the identity emits as the empty string.

    Atom names are qualified with their context id whenever the domain spans
    more than one context.
    """
    ids = {a.context_id for a in pi.domain}
    qualify = len(ids) > 1
    parts = []
    for cyc in pi.cycles():
        names = [a.qualified() if qualify else a.name for a in cyc]
        parts.append("(" + " ".join(names) + ")")
    return "".join(parts)


def parse_cycles(text: str, domain: Iterable[Atom]) -> Permutation:
    """Parse cycle notation like ``(a b)(d e)`` over the given domain.

    Atom tokens are either bare names (which must be unique in the domain) or
    qualified ``<context>.<name>`` forms.  The empty string (or ``()``) is the
    identity.
    """
    dom = frozenset(domain)
    by_name: dict[str, list[Atom]] = {}
    by_qual: dict[str, Atom] = {}
    for a in dom:
        by_name.setdefault(a.name, []).append(a)
        by_qual[a.qualified()] = a

    def resolve(tok: str) -> Atom:
        if tok in by_qual:
            return by_qual[tok]
        hits = by_name.get(tok, [])
        if not hits:
            raise ParseError(f"unknown atom {tok!r} in cycle notation")
        if len(hits) > 1:
            raise ParseError(f"ambiguous atom {tok!r}; qualify it as <context>.<name>")
        return hits[0]

    mapping: dict[Atom, Atom] = {}
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch != "(":
            raise ParseError(f"unexpected {ch!r} in cycle notation")
        end = text.find(")", i)
        if end < 0:
            raise ParseError("unterminated cycle")
        toks = text[i + 1 : end].replace(",", " ").split()
        i = end + 1
        if not toks:
            continue
        atoms = [resolve(t) for t in toks]
        if len(set(atoms)) != len(atoms):
            raise ParseError("repeated atom within a cycle")
        for a in atoms:
            if a in mapping:
                raise ParseError(f"atom {a.name!r} occurs in two cycles")
        for a, b in zip(atoms, atoms[1:] + atoms[:1]):
            mapping[a] = b
    return Permutation(mapping, domain=dom)


def parse_permutation_line(text: str, domain: Iterable[Atom]) -> Permutation:
    """Alias for :func:`parse_cycles`; one permutation per line on the wire."""
    return parse_cycles(text, domain)
