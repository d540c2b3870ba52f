"""Randomised law checks for the consent algebra.

Each law compares verdicts of two expressions over random frames; the
generator is a seeded ``numpy.random.Generator`` so runs are reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ecokin.algebra import (
    EconomicObject,
    Leaf,
    One,
    Product,
    Sum,
    Transaction,
    Verdict,
    Zero,
    eval_expression,
)
from ecokin.kinematics import ConsumerFrame, Event, Worldline

LAWS = (
    "sum_commutativity",
    "product_commutativity",
    "sum_associativity",
    "product_associativity",
    "distributivity",
    "zero_identity",
    "one_identity",
    "annihilation",
    "complement",
)


def random_objects(rng: np.random.Generator, n: int = 4) -> list:
    objs = []
    for i in range(n):
        base = Event(float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)))
        segs = tuple((float(rng.uniform(-0.9, 0.9)), float(rng.uniform(0.2, 3.0)))
                     for _ in range(int(rng.integers(0, 3))))
        objs.append(EconomicObject(chr(ord("A") + i), Worldline(base, segs)))
    return objs


def random_frame(rng: np.random.Generator) -> ConsumerFrame:
    return ConsumerFrame(float(rng.uniform(-0.95, 0.95)),
                         Event(float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1))))


def random_leaf(rng: np.random.Generator, ids) -> Leaf:
    a, b = rng.choice(len(ids), size=2, replace=False)
    q = Fraction(int(rng.integers(1, 9)), int(rng.choice([1, 2, 4])))
    return Leaf(Transaction(ids[a], ids[b]), q)


def random_expr(rng: np.random.Generator, ids, depth: int = 3):
    r = rng.random()
    if depth == 0 or r < 0.4:
        if r < 0.03:
            return Zero
        if r < 0.06:
            return One
        return random_leaf(rng, ids)
    kind = Sum if rng.random() < 0.5 else Product
    n = int(rng.integers(1, 4))
    return kind(tuple(random_expr(rng, ids, depth - 1) for _ in range(n)))


def _distinct_leaves(rng, ids, n):
    seen = set()
    out = []
    while len(out) < n:
        lf = random_leaf(rng, ids)
        if lf.txn not in seen:
            seen.add(lf.txn)
            out.append(lf)
    return out


@dataclass
class LawReport:
    draws: int
    passed: dict = field(default_factory=dict)
    failed: dict = field(default_factory=dict)
    skipped_ties: int = 0

    @property
    def ok(self) -> bool:
        return not any(self.failed.values())


def check_laws(rng: np.random.Generator, draws: int = 1000, objects=None) -> LawReport:
    """Check every law in ``LAWS`` on ``draws`` random (expression, frame) pairs."""
    objects = list(objects) if objects is not None else random_objects(rng)
    pool = {o.id: o for o in objects}
    ids = sorted(pool)
    rep = LawReport(draws, {k: 0 for k in LAWS}, {k: 0 for k in LAWS})

    def ev(f, e):
        return eval_expression(f, e, pool)

    def record(name, ok):
        (rep.passed if ok else rep.failed)[name] += 1

    for _ in range(draws):
        f = random_frame(rng)
        a, b, c = (random_expr(rng, ids) for _ in range(3))
        record("sum_commutativity", ev(f, Sum((a, b))) == ev(f, Sum((b, a))))
        record("product_commutativity", ev(f, Product((a, b))) == ev(f, Product((b, a))))
        record("sum_associativity",
               ev(f, Sum((Sum((a, b)), c))) == ev(f, Sum((a, Sum((b, c))))))
        record("product_associativity",
               ev(f, Product((Product((a, b)), c))) == ev(f, Product((a, Product((b, c))))))
        x, y, z = _distinct_leaves(rng, ids, 3)
        record("distributivity",
               ev(f, Product((Sum((x, y)), z))) == ev(f, Sum((Product((x, z)), Product((y, z))))))
        record("zero_identity", ev(f, Sum((a, Zero))) == ev(f, a) and ev(f, Zero) is Verdict.REFUSAL)
        record("one_identity", ev(f, Product((a, One))) == ev(f, a) and ev(f, One) is Verdict.CONSENT)
        record("annihilation", ev(f, Product((x, x.mirror()))) is Verdict.REFUSAL)
        # complement only holds away from exact valuation ties
        if ev(f, x) is Verdict.REFUSAL and ev(f, x.mirror()) is Verdict.REFUSAL:
            rep.skipped_ties += 1
        else:
            record("complement", ev(f, Sum((x, x.mirror()))) is Verdict.CONSENT)
    return rep


def crossing_fixture() -> dict:
    """Two objects whose valuations cross between unit and double volume.

    In the reference frame A is worth less than B at unit volume and more at
    every volume from 2 upward.
    """
    a = EconomicObject("A", Worldline(Event(0.0, 0.0), ((0.6, 10.0),)))
    b = EconomicObject("B", Worldline(Event(0.2, 0.0), ((0.0, 10.0),)))
    return {"A": a, "B": b}


def witnesses(frame: ConsumerFrame | None = None, objects=None) -> dict:
    """Evaluate the non-Boolean inequalities on the crossing fixture."""
    frame = frame or ConsumerFrame()
    pool = objects or crossing_fixture()
    ab = Leaf(Transaction("A", "B"))
    single = eval_expression(frame, ab, pool)
    squared = eval_expression(frame, Product((ab, ab)), pool)
    doubled = eval_expression(frame, Sum((ab, ab)), pool)
    return {
        "single": single,
        "product_square": squared,
        "sum_double": doubled,
        "square_differs": squared != single,
        "sum_differs": doubled != single,
    }
