"""Propositional disjunctive logic programs under the stable semantics.

Rules have the shape ``h1 ; h2 :- b1, b2, not c1.`` with an optional head
(an empty head is an integrity constraint) and an optional body (a fact).
Atoms that do not occur in a program are never made true by it: answer sets
are enumerated over the occurring atoms only, and everything else is false by
default.  This keeps acceptability checks finite without changing which sets
of atoms are acceptable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import BoundExceeded, InternalError, ParseError
from .perm import Atom, Permutation

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class Rule:
    """A disjunctive rule; ``head`` empty means an integrity constraint."""

    head: frozenset[Atom]
    body_pos: frozenset[Atom]
    body_neg: frozenset[Atom]

    def atoms(self) -> frozenset[Atom]:
        return self.head | self.body_pos | self.body_neg

    def is_constraint(self) -> bool:
        return not self.head

    def is_fact(self) -> bool:
        return bool(self.head) and not self.body_pos and not self.body_neg

    def _apply_perm(self, pi: Permutation) -> "Rule":
        return Rule(
            frozenset(pi(a) for a in self.head),
            frozenset(pi(a) for a in self.body_pos),
            frozenset(pi(a) for a in self.body_neg),
        )


def rule(head: Iterable[Atom] = (), pos: Iterable[Atom] = (), neg: Iterable[Atom] = ()) -> Rule:
    return Rule(frozenset(head), frozenset(pos), frozenset(neg))


def occurring_atoms(program: Iterable[Rule]) -> frozenset[Atom]:
    occ: frozenset[Atom] = frozenset()
    for r in program:
        occ |= r.atoms()
    return occ


# ---------------------------------------------------------------------------
# parsing / emission


def _resolve_alphabet(alphabet) -> dict[str, Atom]:
    if isinstance(alphabet, Mapping):
        return dict(alphabet)
    return {a.name: a for a in alphabet}


def _split_statements(text: str) -> list[tuple[str, int]]:
    """Split on ``.`` outside comments; yields (statement, line_number)."""
    out: list[tuple[str, int]] = []
    buf: list[str] = []
    start_line = 1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("%", 1)[0]
        while "." in line:
            chunk, line = line.split(".", 1)
            if not buf and chunk.strip():
                start_line = lineno
            buf.append(chunk)
            stmt = " ".join(buf).strip()
            if stmt:
                out.append((stmt, start_line))
            buf = []
        if line.strip():
            if not buf:
                start_line = lineno
            buf.append(line)
    if "".join(buf).strip():
        raise ParseError("rule not terminated by '.'", line=start_line)
    return out


def _parse_atom_token(tok: str, names: dict[str, Atom], lineno: int) -> Atom:
    tok = tok.strip()
    if not _NAME_RE.match(tok):
        raise ParseError(f"invalid atom name {tok!r}", line=lineno)
    if tok not in names:
        raise ParseError(f"atom {tok!r} not in the alphabet", line=lineno)
    return names[tok]


def parse_rule(stmt: str, names: dict[str, Atom], lineno: int = 0) -> Rule:
    if ":-" in stmt:
        head_txt, body_txt = stmt.split(":-", 1)
        if ":-" in body_txt:
            raise ParseError("rule has two ':-'", line=lineno)
    else:
        head_txt, body_txt = stmt, ""
    head: set[Atom] = set()
    for part in head_txt.split(";"):
        part = part.strip()
        if part:
            head.add(_parse_atom_token(part, names, lineno))
    if not head and head_txt.strip():
        raise ParseError("malformed head", line=lineno)
    pos: set[Atom] = set()
    neg: set[Atom] = set()
    for part in body_txt.split(","):
        part = part.strip()
        if not part:
            continue
        if part.startswith("not "):
            neg.add(_parse_atom_token(part[4:], names, lineno))
        else:
            pos.add(_parse_atom_token(part, names, lineno))
    return Rule(frozenset(head), frozenset(pos), frozenset(neg))


def parse_program(text: str, alphabet) -> tuple[Rule, ...]:
    """Parse a logic program over a fixed alphabet (name -> atom, or atoms)."""
    names = _resolve_alphabet(alphabet)
    return tuple(parse_rule(stmt, names, lineno) for stmt, lineno in _split_statements(text))


def emit_rule(r: Rule) -> str:
    head = " ; ".join(a.name for a in sorted(r.head))
    body = [a.name for a in sorted(r.body_pos)] + [f"not {a.name}" for a in sorted(r.body_neg)]
    if not body:
        return f"{head}."
    if not head:
        return ":- " + ", ".join(body) + "."
    return f"{head} :- " + ", ".join(body) + "."


def emit_program(program: Iterable[Rule]) -> str:
    return "\n".join(emit_rule(r) for r in program)


# ---------------------------------------------------------------------------
# stable semantics


def reduct(program: Iterable[Rule], x: frozenset[Atom]) -> tuple[Rule, ...]:
    """The Gelfond-Lifschitz reduct of ``program`` with respect to ``x``."""
    out = []
    for r in program:
        if r.body_neg & x:
            continue
        out.append(Rule(r.head, r.body_pos, frozenset()))
    return tuple(out)


def _is_model(program: Sequence[Rule], x: frozenset[Atom]) -> bool:
    for r in program:
        if r.body_pos <= x and x.isdisjoint(r.body_neg) and not (r.head & x):
            return False
    return True


def _least_model(definite: Sequence[Rule], constraints: Sequence[Rule]) -> frozenset[Atom] | None:
    lm: set[Atom] = set()
    changed = True
    while changed:
        changed = False
        for r in definite:
            (h,) = r.head
            if h not in lm and r.body_pos <= lm:
                lm.add(h)
                changed = True
    fz = frozenset(lm)
    for c in constraints:
        if c.body_pos <= fz:
            return None
    return fz


def is_answer_set(program: Sequence[Rule], x: frozenset[Atom]) -> bool:
    """Whether ``x`` is an answer set of ``program``.

    For a non-disjunctive reduct this is the usual least-model comparison; a
    genuinely disjunctive reduct falls back to a subset-minimality scan.
    """
    red = reduct(program, x)
    constraints = [r for r in red if r.is_constraint()]
    proper = [r for r in red if not r.is_constraint()]
    if all(len(r.head) == 1 for r in proper):
        return _least_model(proper, constraints) == x
    if not _is_model(red, x):
        return False
    atoms = sorted(x)
    for k in range(len(atoms)):
        for sub in combinations(atoms, k):
            if _is_model(red, frozenset(sub)):
                return False
    return True


def answer_sets(program: Sequence[Rule], bound: int = 20) -> frozenset[frozenset[Atom]]:
    """All answer sets, as subsets of the atoms occurring in the program.

    Raises :class:`BoundExceeded` when more than ``bound`` atoms occur.
    """
    occ = sorted(occurring_atoms(program))
    if len(occ) > bound:
        raise BoundExceeded(f"program has {len(occ)} occurring atoms (bound {bound})")
    out = []
    for mask in range(1 << len(occ)):
        x = frozenset(a for i, a in enumerate(occ) if mask >> i & 1)
        if is_answer_set(program, x):
            out.append(x)
    return frozenset(out)


# ---------------------------------------------------------------------------
# stratified auxiliary extension


def extend_stratified(
    x: frozenset[Atom], aux_program: Sequence[Rule]
) -> tuple[frozenset[Atom], tuple[Rule, ...]]:
    """Extend ``x`` by the atoms an acyclic auxiliary program derives from it.

    Auxiliary atoms are the rule heads; they are evaluated once each, in
    dependency order (an atom may depend on other auxiliary atoms only
    acyclically, else this raises).  Returns the extended set together with
    the violated integrity constraints of the auxiliary program.
    """
    heads: set[Atom] = set()
    for r in aux_program:
        if len(r.head) > 1:
            raise InternalError("auxiliary rules must have at most one head atom")
        heads |= r.head
    deps: dict[Atom, set[Atom]] = {h: set() for h in heads}
    for r in aux_program:
        for h in r.head:
            deps[h] |= (r.body_pos | r.body_neg) & heads
    order: list[Atom] = []
    state: dict[Atom, int] = {}

    def visit(a: Atom) -> None:
        if state.get(a) == 2:
            return
        if state.get(a) == 1:
            raise InternalError(f"auxiliary rules are cyclic at {a.name}")
        state[a] = 1
        for b in sorted(deps[a]):
            visit(b)
        state[a] = 2
        order.append(a)

    for h in sorted(heads):
        visit(h)

    true = set(x)
    by_head: dict[Atom, list[Rule]] = {h: [] for h in heads}
    for r in aux_program:
        for h in r.head:
            by_head[h].append(r)
    for h in order:
        for r in by_head[h]:
            if r.body_pos <= true and not (r.body_neg & true):
                true.add(h)
                break
    fz = frozenset(true)
    violated = tuple(
        r for r in aux_program if r.is_constraint() and r.body_pos <= fz and not (r.body_neg & fz)
    )
    return fz, violated
