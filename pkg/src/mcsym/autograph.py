"""Automorphisms of vertex-coloured directed graphs.

Small, dependency-free search tuned for the graphs this package builds: a few
hundred vertices with many colour classes.  Colour refinement propagates
(in, out)-degree information per colour until stable; the generator search
individualizes one vertex of the first smallest non-singleton class and
combines stabilizer generators with one coset representative per candidate
image, which generates the full automorphism group.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from typing import Sequence

from .errors import BoundExceeded, ParseError

VertexPerm = tuple[int, ...]


@dataclass(frozen=True)
class Graph:
    colours: tuple[int, ...]
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        n = len(self.colours)
        for u, v in self.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ParseError(f"edge ({u},{v}) out of range for {n} vertices")

    @property
    def n(self) -> int:
        return len(self.colours)


def _adjacency(g: Graph) -> tuple[list[list[int]], list[list[int]]]:
    out: list[list[int]] = [[] for _ in range(g.n)]
    inc: list[list[int]] = [[] for _ in range(g.n)]
    for u, v in g.edges:
        out[u].append(v)
        inc[v].append(u)
    return out, inc


def refine_colouring(g: Graph, colours: Sequence[int] | None = None) -> tuple[int, ...]:
    """Stable colour refinement by per-colour in/out degree signatures.

    Deterministic and independent of vertex numbering: new colour ids are
    assigned by sorting signatures, so isomorphic coloured graphs refine to
    corresponding colourings.
    """
    cur = list(g.colours if colours is None else colours)
    out, inc = _adjacency(g)
    while True:
        sigs = []
        for v in range(g.n):
            sigs.append(
                (
                    cur[v],
                    tuple(sorted(cur[w] for w in out[v])),
                    tuple(sorted(cur[w] for w in inc[v])),
                )
            )
        order = {sig: i for i, sig in enumerate(sorted(set(sigs)))}
        nxt = [order[s] for s in sigs]
        if nxt == cur:
            return tuple(nxt)
        cur = nxt


def is_automorphism(g: Graph, perm: Sequence[int]) -> bool:
    if sorted(perm) != list(range(g.n)):
        return False
    if any(g.colours[perm[v]] != g.colours[v] for v in range(g.n)):
        return False
    return frozenset((perm[u], perm[v]) for u, v in g.edges) == g.edges


def _cells(colours: Sequence[int]) -> dict[int, list[int]]:
    cells: dict[int, list[int]] = {}
    for v, c in enumerate(colours):
        cells.setdefault(c, []).append(v)
    return cells


def _individualize(colours: Sequence[int], v: int) -> list[int]:
    fresh = max(colours) + 1
    out = list(colours)
    out[v] = fresh
    return out


def _search_mapped(g: Graph, c1: Sequence[int], c2: Sequence[int]) -> VertexPerm | None:
    """One colour-respecting automorphism sending classes of c1 onto c2."""
    cells1 = _cells(c1)
    cells2 = _cells(c2)
    if set(cells1) != set(cells2):
        return None
    if any(len(cells1[c]) != len(cells2[c]) for c in cells1):
        return None
    out, inc = _adjacency(g)
    # most constrained first: small classes early
    order: list[int] = []
    for c in sorted(cells1, key=lambda c: (len(cells1[c]), c)):
        order.extend(sorted(cells1[c]))
    mapping: dict[int, int] = {}
    used: set[int] = set()
    edge_set = g.edges

    def consistent(v: int, w: int) -> bool:
        for u, mu in mapping.items():
            if ((u, v) in edge_set) != ((mu, w) in edge_set):
                return False
            if ((v, u) in edge_set) != ((w, mu) in edge_set):
                return False
        return True

    def dfs(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for w in cells2[c1[v]]:
            if w in used or not consistent(v, w):
                continue
            mapping[v] = w
            used.add(w)
            if dfs(i + 1):
                return True
            del mapping[v]
            used.discard(w)
        return False

    if not dfs(0):
        return None
    return tuple(mapping[v] for v in range(g.n))


def automorphism_generators(g: Graph) -> list[VertexPerm]:
    """Generators of the automorphism group of a coloured digraph.

    Orbit-stabilizer scheme: pick the first smallest non-singleton colour
    class after refinement, individualize its least vertex (recursing gives
    the stabilizer's generators), and add one automorphism mapping the least
    vertex to each other class member that admits one.
    """
    if g.n > 10**4:
        raise BoundExceeded(f"graph has {g.n} vertices (bound {10**4})")
    return _generators(g, refine_colouring(g))


def _generators(g: Graph, colours: tuple[int, ...]) -> list[VertexPerm]:
    cells = [sorted(vs) for vs in _cells(colours).values() if len(vs) > 1]
    if not cells:
        return []
    cell = min(cells, key=lambda c: (len(c), c[0]))
    v0 = cell[0]
    c_fixed = refine_colouring(g, _individualize(colours, v0))
    gens = _generators(g, c_fixed)
    for vj in cell[1:]:
        c_other = refine_colouring(g, _individualize(colours, vj))
        a = _search_mapped(g, c_fixed, c_other)
        if a is not None:
            gens.append(a)
    return gens


def automorphisms_brute(g: Graph, class_bound: int = 8) -> frozenset[VertexPerm]:
    """All automorphisms by blockwise exhaustive search (testing oracle)."""
    cells = _cells(g.colours)
    for c, vs in cells.items():
        if len(vs) > class_bound:
            raise BoundExceeded(f"{len(vs)} vertices of colour {c} (bound {class_bound})")
    blocks = [sorted(vs) for _, vs in sorted(cells.items())]
    out = []
    for images in product(*(permutations(b) for b in blocks)):
        perm = [0] * g.n
        for block, img in zip(blocks, images):
            for v, w in zip(block, img):
                perm[v] = w
        p = tuple(perm)
        if is_automorphism(g, p):
            out.append(p)
    return frozenset(out)


# ---------------------------------------------------------------------------
# dump format


def emit_graph(g: Graph) -> str:
    lines = [f"graph {g.n} {len(g.edges)} {len(set(g.colours))}"]
    for v, c in enumerate(g.colours):
        lines.append(f"c {v} {c}")
    for u, v in sorted(g.edges):
        lines.append(f"e {u} {v}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("graph "):
        raise ParseError("expected 'graph <V> <E> <C>' header")
    try:
        _, v_s, e_s, c_s = lines[0].split()
        n, e_count, c_count = int(v_s), int(e_s), int(c_s)
    except ValueError:
        raise ParseError("malformed graph header") from None
    colours = [0] * n
    seen_c: set[int] = set()
    edges: set[tuple[int, int]] = set()
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "c" and len(parts) == 3:
            colours[int(parts[1])] = int(parts[2])
            seen_c.add(int(parts[1]))
        elif parts[0] == "e" and len(parts) == 3:
            edges.add((int(parts[1]), int(parts[2])))
        else:
            raise ParseError(f"unrecognized line {ln!r}")
    if len(edges) != e_count:
        raise ParseError(f"header declares {e_count} edges, found {len(edges)}")
    g = Graph(tuple(colours), frozenset(edges))
    if len(set(g.colours)) != c_count:
        raise ParseError(f"header declares {c_count} colours, found {len(set(g.colours))}")
    return g
