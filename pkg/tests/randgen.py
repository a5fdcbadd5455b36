"""Deterministic random generators for structures and instances.

Every generator takes an explicit ``random.Random`` so test runs are
reproducible; the structure generators construct inputs satisfying the
preconditions of one tractable solver each and assert those preconditions
through the real testers before handing the structure out.
"""

from __future__ import annotations

import random
from fractions import Fraction

import tvcsp as t
from tvcsp.orders import bottom_order, set_partitions

PALETTE = [0, 1, 2, 3, Fraction(1, 2), Fraction(3, 2), Fraction(5, 3)]
VAR_WEIGHTS = [(1, 4), (2, 18), (3, 26), (4, 22), (5, 14), (6, 10), (7, 6)]


def rand_cost(rng: random.Random, inf_prob: float = 0.25) -> t.Cost:
    if rng.random() < inf_prob:
        return t.INF
    return t.Cost(rng.choice(PALETTE))


def rand_relation(rng: random.Random, name: str, arity: int,
                  inf_prob: float = 0.25) -> t.ValuedRelation:
    table = {w: rand_cost(rng, inf_prob)
             for w in t.enumerate_weak_orders(arity)}
    return t.ValuedRelation(name, arity, table)


def rand_crisp_relation(rng: random.Random, name: str,
                        arity: int) -> t.ValuedRelation:
    orders = t.enumerate_weak_orders(arity)
    zeros = [w for w in orders if rng.random() < 0.5]
    if not zeros:
        zeros = [rng.choice(orders)]
    return t.crisp_relation(name, arity, zeros)


# ---------------------------------------------------------------------------
# per-solver structure families
# ---------------------------------------------------------------------------

def make_const_structure(rng: random.Random) -> t.ValuedStructure:
    """Random tables whose all-equal entry is a global minimum."""
    rels = []
    for i in range(rng.randint(1, 3)):
        k = rng.randint(1, 3)
        base = rand_relation(rng, f"C{i}", k)
        table = dict(base.table)
        finite = [c for c in table.values() if c.is_finite]
        if finite:
            table[bottom_order(k)] = min(finite)
        rels.append(t.ValuedRelation(f"C{i}", k, table))
    s = t.ValuedStructure(rels)
    assert all(t.improves(t.OPS["const0"], r) for r in s)
    return s


def _refines(p, q) -> bool:
    return all(any(set(b) <= set(c) for c in q) for b in p)


def _order_partition(w: t.WeakOrder):
    blocks: dict[int, list[int]] = {}
    for pos, r in enumerate(w.ranks):
        blocks.setdefault(r, []).append(pos)
    return tuple(sorted(tuple(b) for b in blocks.values()))


def make_inj_structure(rng: random.Random) -> t.ValuedStructure:
    """Equality-invariant tables monotone under partition refinement, which
    makes the binary injection improve them."""
    rels = []
    for i in range(rng.randint(1, 3)):
        k = rng.randint(1, 3)
        parts = [tuple(sorted(tuple(sorted(b)) for b in blocks))
                 for blocks in set_partitions(range(k))]
        cost = {p: rand_cost(rng) for p in parts}
        cost = {p: min(cost[q] for q in parts if _refines(p, q))
                for p in parts}
        table = {w: cost[_order_partition(w)]
                 for w in t.enumerate_weak_orders(k)}
        rels.append(t.ValuedRelation(f"E{i}", k, table))
    s = t.ValuedStructure(rels)
    assert s.equality_invariant
    assert all(t.improves(t.OPS["inj"], r) for r in s)
    return s


def _r3_variant(rng: random.Random, name: str) -> t.ValuedRelation:
    """0 on injective triples, a fixed finite cost on one chosen
    merge-pattern family, infinite elsewhere."""
    pair = rng.choice([(0, 1), (0, 2), (1, 2)])
    c = t.Cost(rng.choice([1, 2, Fraction(1, 2), Fraction(3, 2)]))
    both_directions = rng.random() < 0.6

    def fn(w: t.WeakOrder) -> t.Cost:
        if w.is_injective():
            return t.ZERO
        p, q = pair
        other = ({0, 1, 2} - {p, q}).pop()
        r = w.ranks
        if r[p] == r[q] != r[other]:
            if both_directions or r[p] < r[other]:
                return c
        return t.INF

    return t.relation_from_fn(name, 3, fn)


def make_lex_structure(rng: random.Random) -> t.ValuedStructure:
    """Structures improved by lex whose derived crisp structure keeps a
    catalog preserver; drawn from a constructive family."""
    rels = []
    kinds = ["softneq", "r3", "eqInf", "unary"]
    n = rng.randint(1, 2)
    for i in range(n):
        kind = rng.choice(kinds)
        if kind == "softneq":
            c = Fraction(rng.choice([0, 1, Fraction(1, 2)]))
            alpha = t.INF if rng.random() < 0.2 else \
                t.Cost(c + rng.choice([Fraction(1, 2), 1, 2]))
            rels.append(t.rel_abg(alpha, c, c, name=f"L{i}"))
        elif kind == "r3":
            rels.append(_r3_variant(rng, f"L{i}"))
        elif kind == "eqInf":
            rels.append(t.rel_abg(t.ZERO, t.INF, t.INF, name=f"L{i}"))
        else:
            rels.append(t.relation_from_fn(f"L{i}", 1,
                                           lambda w: rand_cost(rng, 0.1)))
    s = t.ValuedStructure(rels)
    lex = t.OPS["lex"]
    assert all(t.improves(lex, r) for r in s)
    hat = t.build_hat(s)
    assert any(all(t.preserves(op, r) for r in hat) for op in t.CLASSIFIER_OPS)
    return s


def make_minclosed_crisp(rng: random.Random, name: str,
                         arity: int) -> t.ValuedRelation:
    """Random crisp relation closed under min (by closure construction)."""
    orders = t.enumerate_weak_orders(arity)
    zeros = set(rng.sample(orders, rng.randint(1, len(orders))))
    op = t.OPS["min"]
    changed = True
    while changed:
        changed = False
        for w1 in sorted(zeros):
            for w2 in sorted(zeros):
                for cfg in t.joint_configs(w1, w2):
                    out = t.apply_op(op, cfg)
                    if out not in zeros:
                        zeros.add(out)
                        changed = True
    rel = t.crisp_relation(name, arity, zeros)
    assert t.preserves(op, rel)
    return rel


def make_esscrisp_structure(rng: random.Random) -> t.ValuedStructure:
    """Shifted min-closed (or max-closed) crisp relations: essentially
    crisp with a feasibility structure preserved by min (resp. max)."""
    direction = rng.choice(["min", "max"])
    rels = []
    for i in range(rng.randint(1, 3)):
        k = rng.randint(1, 3)
        base = make_minclosed_crisp(rng, f"S{i}", k)
        if direction == "max":
            base = t.reverse_relation(base, name=f"S{i}")
        amount = rng.choice([0, 1, 2, Fraction(1, 2), Fraction(-3, 2)])
        rels.append(t.shift(base, amount, name=f"S{i}"))
    s = t.ValuedStructure(rels)
    assert s.essentially_crisp
    fs = t.feas_structure(s)
    assert all(t.preserves(t.OPS[direction], r) for r in fs)
    return s


def make_eqinv_structure(rng: random.Random) -> t.ValuedStructure:
    """Unconstrained equality-invariant structures (costs per partition)."""
    rels = []
    for i in range(rng.randint(1, 2)):
        k = rng.randint(1, 3)
        parts = [tuple(sorted(tuple(sorted(b)) for b in blocks))
                 for blocks in set_partitions(range(k))]
        cost = {p: rand_cost(rng) for p in parts}
        table = {w: cost[_order_partition(w)]
                 for w in t.enumerate_weak_orders(k)}
        rels.append(t.ValuedRelation(f"Q{i}", k, table))
    s = t.ValuedStructure(rels)
    assert s.equality_invariant
    return s


# ---------------------------------------------------------------------------
# instances
# ---------------------------------------------------------------------------

def rand_nvars(rng: random.Random, max_vars: int = 7) -> int:
    pool = [n for n, w in VAR_WEIGHTS if n <= max_vars]
    weights = [w for n, w in VAR_WEIGHTS if n <= max_vars]
    return rng.choices(pool, weights=weights, k=1)[0]


def rand_instance(rng: random.Random, structure: t.ValuedStructure,
                  max_vars: int = 7, max_atoms: int = 8,
                  eq_prob: float = 0.08, empty_prob: float = 0.02,
                  threshold_prob: float = 0.0) -> t.Instance:
    n = rand_nvars(rng, max_vars)
    variables = [f"v{i}" for i in range(n)]
    rels = list(structure.relations)
    atoms = []
    for _ in range(rng.randint(1, max_atoms)):
        roll = rng.random()
        if roll < empty_prob:
            atoms.append(("empty", (rng.choice(variables),)))
            continue
        if roll < empty_prob + eq_prob:
            atoms.append(("eq", (rng.choice(variables),
                                 rng.choice(variables))))
            continue
        rel = rng.choice(rels)
        args = tuple(rng.choice(variables) for _ in range(rel.arity))
        atoms.append((rel.name, args))
    threshold = None
    if rng.random() < threshold_prob:
        threshold = t.Cost(rng.choice(PALETTE))
    return t.Instance.from_atoms(atoms, threshold, extra_vars=variables)


def rand_crisp_instance(rng: random.Random,
                        relations: list[t.ValuedRelation],
                        max_vars: int = 7,
                        max_atoms: int = 10) -> t.CrispInstance:
    n = rand_nvars(rng, max_vars)
    variables = tuple(f"v{i}" for i in range(n))
    atoms = []
    for _ in range(rng.randint(1, max_atoms)):
        rel = rng.choice(relations)
        args = tuple(rng.choice(variables) for _ in range(rel.arity))
        atoms.append((rel, args))
    return t.CrispInstance(variables, tuple(atoms))
