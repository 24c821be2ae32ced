"""Symmetry detection, local and distributed.

Local detection reduces one context to a vertex-coloured digraph whose
automorphisms correspond exactly to the partial symmetries of the system with
respect to that context: two vertices per occurring atom (a positive one
coloured by the declaring context and a negative one sharing a single
"negated" colour), one body vertex per rule (knowledge-base and bridge bodies
get distinct colours), edges from body literals to the body vertex, from the
body vertex to each head atom, and one consistency edge from each atom's
positive to its negative vertex.

Distributed detection recursively joins the local sets along the import
digraph, skipping contexts already visited on the current path; every context
in the import closure contributes its local set at least once, and joins are
associative and commutative, so revisits along diamonds are harmless.  The
service variant runs each request in its own thread with a once-initialized
per-context cache, the way separate reasoners would cooperate, and degrades
to exchanging irredundant generators when an enumerated set would exceed the
message cap.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import InternalError
from .autograph import Graph, automorphism_generators
from .mcs import Context, System, import_neighbourhood
from .perm import (
    Atom,
    Permutation,
    emit_cycles,
    group_closure,
    join_sets,
    reduce_irredundant,
)


@dataclass(frozen=True)
class Gap:
    """A context's detection graph plus the vertex bookkeeping."""

    graph: Graph
    atoms: tuple[Atom, ...]
    pos: dict[Atom, int]
    neg: dict[Atom, int]


def exported_atoms(m: System, k: int) -> frozenset[Atom]:
    """Atoms of context ``k`` referenced by other contexts' bridge bodies."""
    out: set[Atom] = set()
    for c in m.contexts:
        if c.id == k:
            continue
        for b in c.br:
            for a in b.body_pos | b.body_neg:
                if a.context_id == k:
                    out.add(a)
    return frozenset(out)


def build_gap(
    ctx: Context, n: int, mode: str = "shared", exported: frozenset[Atom] = frozenset()
) -> Gap:
    """The detection graph of one context of an ``n``-context system.

    ``mode="shared"`` colours a positive atom vertex by its declaring context,
    so atoms of the same context stay interchangeable.  ``mode="local"`` pins
    every non-local atom and every exported local atom with a fresh singleton
    colour; automorphisms then move unexported local atoms only, and the
    resulting permutations are symmetries of the whole system.
    """
    if mode not in ("shared", "local"):
        raise InternalError(f"unknown gap mode {mode!r}")
    occ = sorted(ctx.occurring())
    top = max([n, ctx.id] + [a.context_id for a in occ]) if occ else max(n, ctx.id)
    neg_colour, kb_colour, br_colour = top + 1, top + 2, top + 3
    pos: dict[Atom, int] = {}
    neg: dict[Atom, int] = {}
    colours: list[int] = []
    for a in occ:
        pos[a] = len(colours)
        colours.append(a.context_id)
        neg[a] = len(colours)
        colours.append(neg_colour)
    if mode == "local":
        pinned = [a for a in occ if a.context_id != ctx.id or a in exported]
        fresh = br_colour + 1
        for a in pinned:
            colours[pos[a]] = fresh
            fresh += 1
    edges: set[tuple[int, int]] = set()
    for a in occ:
        edges.add((pos[a], neg[a]))

    def add_body(body_colour: int, pos_lits: Iterable[Atom], neg_lits: Iterable[Atom], heads: Iterable[Atom]) -> None:
        b = len(colours)
        colours.append(body_colour)
        for a in pos_lits:
            edges.add((pos[a], b))
        for a in neg_lits:
            edges.add((neg[a], b))
        for h in heads:
            edges.add((b, pos[h]))

    for r in ctx.kb:
        add_body(kb_colour, r.body_pos, r.body_neg, r.head)
    for br in ctx.br:
        add_body(br_colour, br.body_pos, br.body_neg, [br.head])
    return Gap(Graph(tuple(colours), frozenset(edges)), tuple(occ), pos, neg)


def graph_perm_to_partial_symmetry(
    gap: Gap, vperm: tuple[int, ...], domain: Iterable[Atom]
) -> Permutation:
    """Read an atom permutation off a graph automorphism.

    Positive vertices map to positive vertices (their colours are unique to
    the atom layer), so the restriction to atoms is well defined; atoms of
    the domain that do not occur in the graph stay fixed.
    """
    rev = {v: a for a, v in gap.pos.items()}
    mapping: dict[Atom, Atom] = {}
    for a, v in gap.pos.items():
        w = vperm[v]
        if w not in rev:
            raise InternalError("graph automorphism does not preserve the atom layer")
        mapping[a] = rev[w]
    return Permutation(mapping, domain=frozenset(domain) | frozenset(gap.atoms))


def lsd(m: System, k: int, mode: str = "shared", cap: int = 10**6) -> frozenset[Permutation]:
    """Local symmetry detection: the partial symmetries w.r.t. context ``k``.

    Returns the full enumerated set (identity included) over the universe of
    ``{k}``: the context's alphabet plus its bridge-body atoms.  Atoms of the
    context that occur in none of its rules are unconstrained, so they
    permute freely alongside the graph-detected part.  In local mode the set
    contains symmetries of the whole system that move only unexported local
    atoms.
    """
    ctx = m.context(k)
    dom = m.universe(within=[k])
    exported = exported_atoms(m, k)
    gap = build_gap(ctx, len(m.contexts), mode, exported)
    gens = [
        graph_perm_to_partial_symmetry(gap, vp, dom) for vp in automorphism_generators(gap.graph)
    ]
    gens = [g for g in gens if not g.is_identity()]
    free = sorted(ctx.atoms - frozenset(gap.atoms))
    if mode == "local":
        free = [a for a in free if a not in exported]
    gens.extend(Permutation({x: y, y: x}) for x, y in zip(free, free[1:]))
    if not gens:
        return frozenset({Permutation.identity(dom)})
    return group_closure((g.extend(dom) for g in gens), cap=cap)


def dsd(
    m: System,
    k: int,
    visited: frozenset[int] = frozenset(),
    *,
    mode: str = "shared",
    cache: dict[int, frozenset[Permutation]] | None = None,
    cap: int = 10**6,
) -> frozenset[Permutation]:
    """Distributed symmetry detection from context ``k``.

    Joins the local set of ``k`` with the recursive results of its unvisited
    import neighbours; started with no visited contexts it returns all
    partial symmetries with respect to the import closure of ``k``.
    """
    if cache is None:
        cache = {}
    if k not in cache:
        cache[k] = lsd(m, k, mode=mode, cap=cap)
    acc = cache[k]
    h = visited | {k}
    for i in sorted(import_neighbourhood(m, k) - h):
        acc = join_sets(acc, dsd(m, i, h, mode=mode, cache=cache, cap=cap))
    return acc


# ---------------------------------------------------------------------------
# detection service


@dataclass(frozen=True)
class PermSet:
    """A detection message payload: an atom-permutation set.

    ``complete=False`` marks a degraded payload that only carries generators
    (the enumerated set would have exceeded the message cap).
    """

    perms: frozenset[Permutation]
    complete: bool = True


class _Node:
    def __init__(self, k: int) -> None:
        self.k = k
        self.lock = threading.Lock()
        self.cache: frozenset[Permutation] | None = None
        self.requests = 0
        self.cache_hits = 0


class _Pending:
    def __init__(self) -> None:
        self.event = threading.Event()
        self.value: PermSet | None = None
        self.error: BaseException | None = None

    def resolve(self, value: PermSet) -> None:
        self.value = value
        self.event.set()

    def fail(self, error: BaseException) -> None:
        self.error = error
        self.event.set()

    def wait(self) -> PermSet:
        self.event.wait()
        if self.error is not None:
            raise self.error
        assert self.value is not None
        return self.value


class DetectionService:
    """Per-context detection nodes with persistent once-initialized caches.

    A node's local set is computed at most once (under its lock) and reused
    across requests; every incoming request is handled in its own thread, so
    concurrent fan-out over diamond-shaped import graphs just works.  The
    message log records the line-delimited wire form of each exchange.
    """

    def __init__(
        self, m: System, mode: str = "shared", message_cap: int = 4096, cap: int = 10**6
    ) -> None:
        self.m = m
        self.mode = mode
        self.message_cap = message_cap
        self.cap = cap
        self.nodes = {c.id: _Node(c.id) for c in m.contexts}
        self.log: list[str] = []
        self._log_lock = threading.Lock()

    def _append_log(self, lines: list[str]) -> None:
        with self._log_lock:
            self.log.extend(lines)

    def request(self, k: int, visited: frozenset[int] = frozenset()) -> PermSet:
        """Send one detection request and wait for the reply."""
        return self._send(k, frozenset(visited)).wait()

    @property
    def requests(self) -> dict[int, int]:
        return {k: n.requests for k, n in self.nodes.items()}

    @property
    def cache_hits(self) -> dict[int, int]:
        return {k: n.cache_hits for k, n in self.nodes.items()}

    def _send(self, k: int, h: frozenset[int]) -> _Pending:
        pending = _Pending()
        t = threading.Thread(target=self._handle, args=(k, h, pending), daemon=True)
        t.start()
        return pending

    def _handle(self, k: int, h: frozenset[int], pending: _Pending) -> None:
        try:
            self._append_log([f"DSD {k} H={','.join(map(str, sorted(h))) or '-'}"])
            node = self.nodes[k]
            with node.lock:
                node.requests += 1
                if node.cache is None:
                    node.cache = lsd(self.m, k, mode=self.mode, cap=self.cap)
                else:
                    node.cache_hits += 1
                local = node.cache
            h2 = h | {k}
            children = [
                self._send(i, h2) for i in sorted(import_neighbourhood(self.m, k) - h2)
            ]
            perms = local
            complete = True
            for child in children:
                payload = child.wait()
                complete = complete and payload.complete
                perms = join_sets(perms, payload.perms)
            if len(perms) > self.message_cap:
                # degrade: ship a generating subset instead of a wrong answer
                gens = frozenset(reduce_irredundant(perms, cap=self.cap))
                reply = PermSet(gens, complete=False)
            else:
                reply = PermSet(perms, complete=complete)
            lines = [f"PERMSET {len(reply.perms)}"]
            if not reply.complete:
                lines[0] += " generators"
            lines.extend(sorted(emit_cycles(p) or "()" for p in reply.perms))
            self._append_log(lines)
            pending.resolve(reply)
        except BaseException as exc:  # surface in the waiting thread
            pending.fail(exc)


def run_detection_service(
    m: System, mode: str = "shared", message_cap: int = 4096, cap: int = 10**6
) -> DetectionService:
    """Start the per-context detection nodes and return the service handle."""
    return DetectionService(m, mode=mode, message_cap=message_cap, cap=cap)
