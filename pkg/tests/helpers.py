"""Shared test helpers: cycle views, atom lookup, seeded random systems."""

from __future__ import annotations

import random

from mcsym import Atom, BridgeRule, Context, Rule, System, emit_cycles


def cyc(perms) -> set[str]:
    """Canonical cycle-string view of a permutation collection; identity is "()"."""
    return {emit_cycles(p) or "()" for p in perms}


def atoms_of(m: System, *names: str) -> tuple[Atom, ...]:
    """Resolve globally unique atom names of a system (originals and aux)."""
    by_name: dict[str, Atom] = {}
    for c in m.contexts:
        for a in c.alphabet + c.aux:
            if a.name in by_name:
                raise ValueError(f"ambiguous atom name {a.name!r}")
            by_name[a.name] = a
    return tuple(by_name[n] for n in names)


def state_of(m: System, mapping: dict[int, set | None]):
    """BeliefState from {context id: set of atom names | None}; missing ids are eps."""
    from mcsym import BeliefState

    comps: dict[int, frozenset | None] = {i: None for i in m.ids}
    for i, names in mapping.items():
        if names is None:
            comps[i] = None
        else:
            comps[i] = frozenset(atoms_of(m, *names))
    return BeliefState.make(comps)


def random_system(
    rng: random.Random,
    max_contexts: int = 4,
    max_atoms: int = 4,
    *,
    twin_bias: float = 0.6,
    allow_cycles: bool = True,
    edge_probability: float = 0.5,
) -> System:
    """A random well-formed system, biased toward symmetric structure.

    Contexts with at least two atoms may receive a "twin pair": their last two
    atoms get the mirrored rules ``x :- not y.`` / ``y :- not x.`` and are kept
    out of other local rules, and importers may reference both twins with the
    same head and sign.  This makes nontrivial symmetry groups common while
    everything else stays arbitrary.
    """
    n = rng.randint(1, max_contexts)
    alphabets = {
        i: tuple(Atom(i, f"a{i}_{j}") for j in range(1, rng.randint(1, max_atoms) + 1))
        for i in range(1, n + 1)
    }
    twins: dict[int, tuple[Atom, Atom]] = {}
    for i in range(1, n + 1):
        if len(alphabets[i]) >= 2 and rng.random() < twin_bias:
            twins[i] = (alphabets[i][-2], alphabets[i][-1])

    edges: set[tuple[int, int]] = set()  # (importer, exporter)
    for k in range(1, n + 1):
        for j in range(1, n + 1):
            if j == k:
                continue
            if not allow_cycles and j > k:
                continue
            if rng.random() < edge_probability:
                edges.add((k, j))

    contexts = []
    for i in range(1, n + 1):
        atoms = alphabets[i]
        plain = [a for a in atoms if i not in twins or a not in twins[i]]
        kb: list[Rule] = []
        for _ in range(rng.randint(0, 2)):
            if not plain:
                break
            head = frozenset(rng.sample(plain, rng.randint(1, min(2, len(plain)))))
            rest = [a for a in plain if a not in head]
            pos = frozenset(rng.sample(rest, min(len(rest), rng.randint(0, 1))))
            neg_pool = [a for a in plain if a not in pos]
            neg = frozenset(rng.sample(neg_pool, min(len(neg_pool), rng.randint(0, 1))))
            kb.append(Rule(head, pos, neg))
        if i in twins:
            x, y = twins[i]
            kb.append(Rule(frozenset({x}), frozenset(), frozenset({y})))
            kb.append(Rule(frozenset({y}), frozenset(), frozenset({x})))

        br: list[BridgeRule] = []
        for k_imp, j_exp in sorted(edges):
            if k_imp != i:
                continue
            foreign = alphabets[j_exp]
            for _ in range(rng.randint(1, 2)):
                head = rng.choice(atoms)
                body = rng.sample(foreign, rng.randint(1, min(2, len(foreign))))
                pos = frozenset(a for a in body if rng.random() < 0.5)
                neg = frozenset(a for a in body if a not in pos)
                br.append(BridgeRule(head, pos, neg))
            if j_exp in twins and rng.random() < 0.5:
                x, y = twins[j_exp]
                head = rng.choice(plain or list(atoms))
                if rng.random() < 0.5:
                    br.append(BridgeRule(head, frozenset({x}), frozenset()))
                    br.append(BridgeRule(head, frozenset({y}), frozenset()))
                else:
                    br.append(BridgeRule(head, frozenset(), frozenset({x})))
                    br.append(BridgeRule(head, frozenset(), frozenset({y})))
        contexts.append(Context(i, atoms, tuple(kb), tuple(dict.fromkeys(br))))
    return System(tuple(contexts))
