"""Economic objects, transactions and the algebra of consent.

A consumer is modelled as an inertial frame; its valuation of an object is
the quantity coordinate it assigns to the object's state. An offered
transaction ``[AB]`` (receive A, deliver B) is accepted iff the valuation of
A strictly exceeds that of B, both taken at the offered volume.

Expressions combine offers with ``Sum`` (consent to at least one) and
``Product`` (consent to all). Unlike Boolean algebra, repeating a transaction
changes its volume: ``[AB]·[AB] = [AB]^2``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from ecokin.kinematics import ConsumerFrame, Event, Worldline

PARTITION_RTOL = 1e-9


class Verdict(enum.Enum):
    CONSENT = "consent"
    REFUSAL = "refusal"

    def __bool__(self):
        return self is Verdict.CONSENT

    @classmethod
    def of(cls, flag: bool) -> "Verdict":
        return cls.CONSENT if flag else cls.REFUSAL


@dataclass(frozen=True)
class EconomicObject:
    id: str
    worldline: Worldline = Worldline()

    def state_at_volume(self, q) -> Event:
        """State of the ``q``-fold quantity: proper offset log2(q) from the base."""
        q = _positive_exponent(q)
        return self.worldline.at_proper(math.log2(q))


@dataclass(frozen=True)
class Transaction:
    """Offer to deliver ``deliver`` and receive ``receive``; written [receive deliver]."""

    receive: str
    deliver: str

    def __post_init__(self):
        if self.receive == self.deliver:
            raise ValueError(f"transaction must exchange two distinct objects, got {self.receive!r} twice")

    def mirror(self) -> "Transaction":
        return Transaction(self.deliver, self.receive)

    def __str__(self):
        return f"[{self.receive}{self.deliver}]"


def _positive_exponent(q) -> Fraction:
    if type(q) is Fraction and q > 0:
        return q
    if isinstance(q, float):
        if not math.isfinite(q):
            raise ValueError(f"exponent must be finite, got {q!r}")
        q = Fraction(q).limit_denominator(10**9)
    q = Fraction(q)
    if q <= 0:
        raise ValueError(f"exponent must be positive, got {q}")
    return q


# -- expression tree ---------------------------------------------------------


class Expr:
    __slots__ = ()

    def __add__(self, other):
        return Sum((self, other))

    def __mul__(self, other):
        return Product((self, other))

    def __pow__(self, q):
        if isinstance(self, Leaf):
            return Leaf(self.txn, self.q * _positive_exponent(q))
        raise TypeError("only leaves can be raised to a volume exponent")


@dataclass(frozen=True)
class Leaf(Expr):
    txn: Transaction
    q: Fraction = Fraction(1)

    def __post_init__(self):
        if not isinstance(self.txn, Transaction):
            raise TypeError(f"leaf needs a Transaction, got {type(self.txn).__name__}")
        object.__setattr__(self, "q", _positive_exponent(self.q))

    def mirror(self) -> "Leaf":
        return Leaf(self.txn.mirror(), self.q)

    def __str__(self):
        return str(self.txn) if self.q == 1 else f"{self.txn}^{self.q}"


@dataclass(frozen=True)
class Sum(Expr):
    children: tuple

    def __post_init__(self):
        _check_children(self, self.children)

    def __str__(self):
        return "(" + " + ".join(map(str, self.children)) + ")"


@dataclass(frozen=True)
class Product(Expr):
    children: tuple

    def __post_init__(self):
        _check_children(self, self.children)

    def __str__(self):
        return "(" + " * ".join(map(str, self.children)) + ")"


@dataclass(frozen=True)
class _Const(Expr):
    value: bool

    def __str__(self):
        return "[1]" if self.value else "[0]"


Zero = _Const(False)
One = _Const(True)


def _check_children(node, children):
    children = tuple(children)
    object.__setattr__(node, "children", children)
    if not children:
        raise ValueError(f"{type(node).__name__} needs at least one child")
    for c in children:
        if not isinstance(c, Expr):
            raise TypeError(f"malformed expression: {c!r} is not an expression node")


def leaf(receive: str, deliver: str, q=1) -> Leaf:
    return Leaf(Transaction(receive, deliver), q)


ExprLike = Union[Leaf, Sum, Product, _Const]


# -- canonical form ----------------------------------------------------------


def sort_key(e: Expr):
    if isinstance(e, _Const):
        return (0, int(e.value))
    if isinstance(e, Leaf):
        return (1, e.txn.receive, e.txn.deliver, e.q)
    kind = 2 if isinstance(e, Sum) else 3
    return (kind, tuple(sort_key(c) for c in e.children))


def _flatten(e: Expr) -> Expr:
    """Apply associativity only: nested nodes of the same kind are merged."""
    if isinstance(e, (Sum, Product)):
        kind = type(e)
        out = []
        for c in e.children:
            c = _flatten(c)
            if type(c) is kind:
                out.extend(c.children)
            else:
                out.append(c)
        return kind(tuple(out))
    return e


def _scale(e: Expr, j: int):
    """``e`` at ``j`` times its volume, for leaves and products of leaves."""
    if isinstance(e, Leaf):
        return Leaf(e.txn, e.q * j)
    if isinstance(e, Product) and all(isinstance(c, Leaf) for c in e.children):
        return Product(tuple(Leaf(c.txn, c.q * j) for c in e.children))
    return None


def _canon_product(children) -> Expr:
    merged: dict = {}
    rest = []
    for c in children:
        if c == Zero:
            return Zero
        if c == One:
            continue
        if isinstance(c, Leaf):
            merged[c.txn] = merged.get(c.txn, Fraction(0)) + c.q
        else:
            rest.append(c)
    for txn, q in merged.items():
        if merged.get(txn.mirror()) == q:
            return Zero
    out = [Leaf(t, q) for t, q in merged.items()] + rest
    if not out:
        return One
    if len(out) == 1:
        return out[0]
    return Product(tuple(sorted(out, key=sort_key)))


def _canon_sum(children) -> Expr:
    groups: dict = {}
    for c in children:
        if c == Zero:
            continue
        if c == One:
            return One
        k = sort_key(c)
        if k in groups:
            groups[k][1] += 1
        else:
            groups[k] = [c, 1]
    items: dict = {}
    dups = []
    for k, (c, m) in groups.items():
        if m > 1 and _scale(c, 2) is not None:
            # m identical offers: a choice among the 1x..m-fold volumes
            for j in range(1, m + 1):
                s = canonicalize(_scale(c, j))
                if s != Zero:
                    items.setdefault(sort_key(s), s)
        else:
            items.setdefault(k, c)
            dups.extend([c] * (m - 1))
    out = list(items.values()) + dups
    if not out:
        return Zero
    if len(out) == 1:
        return out[0]
    return Sum(tuple(sorted(out, key=sort_key)))


def canonicalize(e: Expr) -> Expr:
    """Normal form of an expression.

    Nested sums and products are flattened, children sorted, [0] removed from
    sums and [1] from products, identical leaves in a product merged by adding
    volumes, a product holding an offer and its mirror at equal volume
    annihilated, and m identical offers in a sum rewritten as the choice among
    the 1x..m-fold aggregate volumes. The result is idempotent.
    """
    if not isinstance(e, Expr):
        raise TypeError(f"malformed expression: {e!r}")
    return _canon(_flatten(e))


def _canon(e: Expr) -> Expr:
    # ``e`` is already flattened, so are all of its descendants
    if isinstance(e, (Leaf, _Const)):
        return e
    children = [_canon(c) for c in e.children]
    # canonical children may be of the parent kind again (e.g. a collapsed product)
    flat = []
    for c in children:
        if type(c) is type(e):
            flat.extend(c.children)
        else:
            flat.append(c)
    if isinstance(e, Product):
        return _canon_product(flat)
    return _canon_sum(flat)


# -- evaluation --------------------------------------------------------------


def _resolve(objects: Mapping[str, EconomicObject], oid: str) -> EconomicObject:
    try:
        return objects[oid]
    except KeyError:
        raise KeyError(f"unknown object id {oid!r}") from None


def consent(frame: ConsumerFrame, txn: Transaction, exponent, objects: Mapping[str, EconomicObject]) -> Verdict:
    """Verdict of ``frame`` on ``txn`` at volume ``exponent``.

    Consent iff the frame values the received object strictly above the
    delivered one; ties are refused.
    """
    q = _positive_exponent(exponent)
    a = _resolve(objects, txn.receive)
    b = _resolve(objects, txn.deliver)
    va = frame.valuation(a.state_at_volume(q))
    vb = frame.valuation(b.state_at_volume(q))
    return Verdict.of(va > vb)


def _eval(frame, e, objects) -> bool:
    if isinstance(e, _Const):
        return e.value
    if isinstance(e, Leaf):
        return bool(consent(frame, e.txn, e.q, objects))
    if isinstance(e, Sum):
        return any(_eval(frame, c, objects) for c in e.children)
    if isinstance(e, Product):
        return all(_eval(frame, c, objects) for c in e.children)
    raise TypeError(f"malformed expression: {e!r}")


def eval_expression(frame: ConsumerFrame, expr: Expr, objects: Mapping[str, EconomicObject]) -> Verdict:
    return Verdict.of(_eval(frame, canonicalize(expr), objects))


def as_object_map(objects) -> dict:
    if isinstance(objects, Mapping):
        return dict(objects)
    return {o.id: o for o in objects}


# -- relations between objects ----------------------------------------------


def indistinguishable(obj_a: EconomicObject, obj_b: EconomicObject,
                      probe_frames: Sequence[ConsumerFrame],
                      probe_objects: Sequence[EconomicObject]) -> bool:
    """Sampled indistinguishability: identical verdicts against every probe.

    Probe objects sharing an id with either candidate are skipped.
    """
    if not probe_frames or not probe_objects:
        raise ValueError("probe frames and probe objects must be non-empty")
    for f in probe_frames:
        for x in probe_objects:
            if x.id in (obj_a.id, obj_b.id):
                continue
            pool_a = {"_": obj_a, x.id: x}
            pool_b = {"_": obj_b, x.id: x}
            for txn in (Transaction("_", x.id), Transaction(x.id, "_")):
                if consent(f, txn, 1, pool_a) != consent(f, txn, 1, pool_b):
                    return False
    return True


def partition_equivalents(frame: ConsumerFrame, objects: Sequence[EconomicObject],
                          rtol: float = PARTITION_RTOL) -> list:
    """Group objects the frame values equally (unit volume).

    Values are sorted and each class is anchored at its smallest member, so
    the relation is an equivalence by construction. Classes are returned in
    order of their first member in ``objects``.
    """
    objects = list(objects)
    vals = [frame.valuation(o.worldline.base) for o in objects]
    order = sorted(range(len(objects)), key=lambda i: (vals[i], i))
    label = [0] * len(objects)
    cls = -1
    anchor = None
    for i in order:
        if anchor is None or not math.isclose(vals[i], anchor, rel_tol=rtol, abs_tol=rtol * 1e-3):
            cls += 1
            anchor = vals[i]
        label[i] = cls
    groups: dict = {}
    for i, o in enumerate(objects):
        groups.setdefault(label[i], []).append(o)
    return list(groups.values())
