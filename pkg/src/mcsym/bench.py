"""Benchmark instance generation and the detect/break/solve pipeline.

Topologies (an edge ``u -> v`` means context ``u`` imports from context ``v``):

* ``diamond``: stacked diamonds; diamond ``d`` has top ``3d-2``, middles
  ``3d-1`` and ``3d``, bottom ``3d+1`` (the next diamond's top), so ``n`` must
  be ``1 mod 3``.  The two middles are unconnected.
* ``zigzag``: diamonds plus the tie-breaking edge middle1 -> middle2.
* ``house``: a ridge imports both middles, and the four cycle edges
  m1 -> b1 -> m2 -> b2 -> m1 close the walls; basements become the ridges of
  later houses (FIFO), so ``n`` must be ``1 mod 4``.
* ``ring``: ``i -> i+1`` and ``n -> 1``; ``n >= 2``.

Knowledge bases are drawn per context from a counter-based generator (Philox)
seeded by spawning one child sequence per context off the instance seed, so
instances are reproducible byte for byte.  Most contexts carry an
interchangeable atom pair (an even/odd choice gadget kept away from the
export interface), which is what gives the symmetry-breaking rewrite
something to compress.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .asp import Rule
from .errors import ParseError
from .detect import dsd, lsd
from .mcs import (
    BridgeRule,
    Context,
    System,
    evaluate_distributed,
    import_closure,
)
from .perm import Atom, Permutation, emit_cycles, group_closure
from .sbc import AtomOrder, default_order, extend_mcs, select_breaking_set

TOPOLOGIES = ("diamond", "zigzag", "house", "ring")


@dataclass(frozen=True)
class TopologySpec:
    topology: str
    n: int
    seed: int
    atoms_per_context: int = 4
    max_exports: int = 3
    max_kb_rules: int = 2
    max_bridge_rules: int = 3
    max_body: int = 2
    pair_probability: float = 0.8

    def __post_init__(self) -> None:
        if self.topology not in TOPOLOGIES:
            raise ParseError(f"unknown topology {self.topology!r}")
        if self.topology in ("diamond", "zigzag") and (self.n < 4 or self.n % 3 != 1):
            raise ParseError(f"{self.topology} needs n = 1 mod 3, n >= 4; got {self.n}")
        if self.topology == "house" and (self.n < 5 or self.n % 4 != 1):
            raise ParseError(f"house needs n = 1 mod 4, n >= 5; got {self.n}")
        if self.topology == "ring" and self.n < 2:
            raise ParseError(f"ring needs n >= 2; got {self.n}")
        if self.atoms_per_context < 3:
            raise ParseError("need at least 3 atoms per context")


def topology_edges(spec: TopologySpec) -> frozenset[tuple[int, int]]:
    """Import edges ``(u, v)``: context u's bridges reference context v."""
    edges: set[tuple[int, int]] = set()
    n = spec.n
    if spec.topology in ("diamond", "zigzag"):
        for d in range(1, (n - 1) // 3 + 1):
            t, m1, m2, b = 3 * d - 2, 3 * d - 1, 3 * d, 3 * d + 1
            edges |= {(t, m1), (t, m2), (m1, b), (m2, b)}
            if spec.topology == "zigzag":
                edges.add((m1, m2))
    elif spec.topology == "house":
        queue = [1]
        nxt = 2
        while nxt + 3 <= n:
            r = queue.pop(0)
            m1, m2, b1, b2 = nxt, nxt + 1, nxt + 2, nxt + 3
            nxt += 4
            edges |= {(r, m1), (r, m2), (m1, b1), (b1, m2), (m2, b2), (b2, m1)}
            queue += [b1, b2]
    else:  # ring
        edges = {(i, i + 1) for i in range(1, n)}
        edges.add((n, 1))
    return frozenset(edges)


def generate(spec: TopologySpec) -> System:
    """A reproducible random system on the requested topology."""
    root_ss = np.random.SeedSequence(spec.seed)
    rngs = {
        i + 1: np.random.Generator(np.random.Philox(child))
        for i, child in enumerate(root_ss.spawn(spec.n))
    }
    edges = topology_edges(spec)
    out_edges = {i: sorted(v for u, v in edges if u == i) for i in range(1, spec.n + 1)}

    alphabet: dict[int, tuple[Atom, ...]] = {}
    plain: dict[int, list[Atom]] = {}
    pair: dict[int, tuple[Atom, Atom] | None] = {}
    exports: dict[int, list[Atom]] = {}
    kbs: dict[int, list[Rule]] = {}

    k = spec.atoms_per_context
    for i in range(1, spec.n + 1):
        rng = rngs[i]
        atoms = tuple(Atom(i, f"a{i}_{j}") for j in range(1, k + 1))
        alphabet[i] = atoms
        has_pair = bool(rng.random() < spec.pair_probability)
        if has_pair:
            pair[i] = (atoms[-2], atoms[-1])
            plain[i] = list(atoms[:-2])
        else:
            pair[i] = None
            plain[i] = list(atoms)
        n_exp = int(rng.integers(1, min(spec.max_exports, len(plain[i])) + 1))
        exports[i] = plain[i][:n_exp]
        kb: list[Rule] = []
        if pair[i] is not None:
            p, q = pair[i]
            kb.append(Rule(frozenset({p}), frozenset(), frozenset({q})))
            kb.append(Rule(frozenset({q}), frozenset(), frozenset({p})))
        n_rules = int(rng.integers(1, spec.max_kb_rules + 1))
        for _ in range(n_rules):
            head_atom = plain[i][int(rng.integers(0, len(plain[i])))]
            heads = {head_atom}
            if len(plain[i]) >= 2 and rng.random() < 0.2:
                other = plain[i][int(rng.integers(0, len(plain[i])))]
                heads.add(other)
            body_pool = [a for a in plain[i] if a not in heads]
            size = int(rng.integers(0, min(spec.max_body, len(body_pool)) + 1))
            body_pos: set[Atom] = set()
            body_neg: set[Atom] = set()
            if size:
                picks = rng.choice(len(body_pool), size=size, replace=False)
                for idx in sorted(int(x) for x in picks):
                    if rng.random() < 0.4:
                        body_neg.add(body_pool[idx])
                    else:
                        body_pos.add(body_pool[idx])
            kb.append(Rule(frozenset(heads), frozenset(body_pos), frozenset(body_neg)))
        kbs[i] = kb

    contexts = []
    for i in range(1, spec.n + 1):
        rng = rngs[i]
        brs: list[BridgeRule] = []
        for v in out_edges[i]:
            brs.append(_random_bridge(rng, spec, plain[i], exports[v]))
        if out_edges[i]:
            extra = int(rng.integers(0, max(0, spec.max_bridge_rules - len(out_edges[i])) + 1))
            for _ in range(extra):
                v = out_edges[i][int(rng.integers(0, len(out_edges[i])))]
                brs.append(_random_bridge(rng, spec, plain[i], exports[v]))
        contexts.append(Context(i, alphabet[i], tuple(kbs[i]), tuple(brs)))
    return System(tuple(contexts))


def _random_bridge(
    rng: np.random.Generator,
    spec: TopologySpec,
    own_plain: Sequence[Atom],
    neighbour_exports: Sequence[Atom],
) -> BridgeRule:
    head = own_plain[int(rng.integers(0, len(own_plain)))]
    size = int(rng.integers(1, min(spec.max_body, len(neighbour_exports)) + 1))
    picks = rng.choice(len(neighbour_exports), size=size, replace=False)
    pos: set[Atom] = set()
    neg: set[Atom] = set()
    for idx in sorted(int(x) for x in picks):
        if rng.random() < 0.4:
            neg.add(neighbour_exports[idx])
        else:
            pos.add(neighbour_exports[idx])
    return BridgeRule(head, frozenset(pos), frozenset(neg))


# ---------------------------------------------------------------------------
# pipeline


@dataclass(frozen=True)
class RunReport:
    instance: str
    topology: str
    n: int
    seed: int
    root: int
    mode: str
    before: int
    after: int
    compression: float
    group_size: int
    generator_count: int
    t_detect: float
    t_break: float
    t_solve_before: float
    t_solve_after: float

    def row(self) -> dict:
        return {
            "kind": "instance",
            "instance": self.instance,
            "topology": self.topology,
            "n": self.n,
            "seed": self.seed,
            "root": self.root,
            "mode": self.mode,
            "before": self.before,
            "after": self.after,
            "compression": round(self.compression, 6),
            "group_size": self.group_size,
            "generator_count": self.generator_count,
            "t_detect": round(self.t_detect, 6),
            "t_break": round(self.t_break, 6),
            "t_solve_before": round(self.t_solve_before, 6),
            "t_solve_after": round(self.t_solve_after, 6),
        }


def run_pipeline(
    m: System,
    root: int,
    mode: str = "full",
    budget: int = 8,
    order: AtomOrder | None = None,
    *,
    instance: str = "",
    topology: str = "",
    n: int = 0,
    seed: int = 0,
    bound: int = 20,
) -> RunReport:
    """Detect symmetries from ``root``, rewrite, and solve before/after.

    ``mode="none"`` skips the rewrite (a baseline run); ``mode="full"`` breaks
    with the entire detected set; ``mode="generators"`` detects per-context
    local symmetries (pinning the export interface), keeps an irredundant
    generating subset truncated to ``budget``, and breaks with those only.
    """
    if mode not in ("none", "full", "generators"):
        raise ParseError(f"unknown pipeline mode {mode!r}")
    order = order or default_order(m)
    t0 = time.perf_counter()
    breakers: list[Permutation] = []
    group_size = 0
    if mode == "full":
        detected = dsd(m, root)
        group_size = len(detected)
        breakers = sorted(
            (p for p in detected if not p.is_identity()),
            key=lambda p: (len(p.support), emit_cycles(p)),
        )
    elif mode == "generators":
        pool: set[Permutation] = set()
        for i in sorted(import_closure(m, root)):
            pool |= {p for p in lsd(m, i, mode="local") if not p.is_identity()}
        group_size = len(group_closure(pool)) if pool else 1
        breakers = select_breaking_set(pool, budget=budget)
    t_detect = time.perf_counter() - t0

    t0 = time.perf_counter()
    extended = extend_mcs(m, breakers, order) if breakers else m
    t_break = time.perf_counter() - t0

    t0 = time.perf_counter()
    before = evaluate_distributed(m, root, bound=bound)
    t_solve_before = time.perf_counter() - t0

    t0 = time.perf_counter()
    after = evaluate_distributed(extended, root, bound=bound) if breakers else before
    t_solve_after = time.perf_counter() - t0

    nb, na = len(before), len(after)
    compression = 1.0 - (na / nb) if nb else 0.0
    return RunReport(
        instance=instance or (f"{topology}-n{n}-s{seed}" if topology else "instance"),
        topology=topology,
        n=n,
        seed=seed,
        root=root,
        mode=mode,
        before=nb,
        after=na,
        compression=compression,
        group_size=group_size,
        generator_count=len(breakers),
        t_detect=t_detect,
        t_break=t_break,
        t_solve_before=t_solve_before,
        t_solve_after=t_solve_after,
    )


# ---------------------------------------------------------------------------
# reporting


_COLUMNS = [
    "kind",
    "instance",
    "topology",
    "n",
    "seed",
    "root",
    "mode",
    "before",
    "after",
    "compression",
    "group_size",
    "generator_count",
    "t_detect",
    "t_break",
    "t_solve_before",
    "t_solve_after",
    "count",
]


def _aggregate(reports: Sequence[RunReport]) -> list[dict]:
    cells: dict[tuple[str, int, str], list[RunReport]] = {}
    for r in reports:
        cells.setdefault((r.topology, r.n, r.mode), []).append(r)
    out = []
    for (topology, n, mode), rs in sorted(cells.items()):
        out.append(
            {
                "kind": "aggregate",
                "topology": topology,
                "n": n,
                "mode": mode,
                "count": len(rs),
                "before": round(sum(r.before for r in rs) / len(rs), 6),
                "after": round(sum(r.after for r in rs) / len(rs), 6),
                "compression": round(sum(r.compression for r in rs) / len(rs), 6),
            }
        )
    return out


def report_table(reports: Sequence[RunReport], format: str = "text") -> str:
    """Render per-instance rows plus per-(topology, n, mode) averages."""
    rows = [r.row() for r in reports]
    aggregates = _aggregate(reports)
    if format == "json":
        import json

        return json.dumps({"instances": rows, "aggregates": aggregates}, indent=2)
    if format == "csv":
        import csv
        import io

        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=_COLUMNS)
        w.writeheader()
        for row in rows + aggregates:
            w.writerow({c: row.get(c, "") for c in _COLUMNS})
        return buf.getvalue()
    if format != "text":
        raise ParseError(f"unknown report format {format!r}")
    lines = []
    inst_cols = ["instance", "mode", "before", "after", "compression", "group_size",
                 "generator_count", "t_detect", "t_solve_before", "t_solve_after"]
    widths = {c: max(len(c), *(len(str(r.get(c, ""))) for r in rows)) if rows else len(c) for c in inst_cols}
    lines.append("  ".join(c.ljust(widths[c]) for c in inst_cols))
    for r in rows:
        lines.append("  ".join(str(r.get(c, "")).ljust(widths[c]) for c in inst_cols))
    if aggregates:
        lines.append("")
        agg_cols = ["topology", "n", "mode", "count", "before", "after", "compression"]
        awidths = {c: max(len(c), *(len(str(a.get(c, ""))) for a in aggregates)) for c in agg_cols}
        lines.append("  ".join(c.ljust(awidths[c]) for c in agg_cols))
        for a in aggregates:
            lines.append("  ".join(str(a.get(c, "")).ljust(awidths[c]) for c in agg_cols))
    return "\n".join(lines) + "\n"
