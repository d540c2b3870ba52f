"""Scenario configuration: parsing, validation and canonical serialisation.

A config is a YAML (or JSON) mapping::

    version: ecokin/1
    seed: 7                      # optional
    objects:
      - {id: A, base: [0, 0], segments: [[0.6, 10]]}
    frames:
      - {id: ref, v: 0.0, origin: [0, 0]}
    expressions:
      - {id: sq, expr: {product: [{leaf: [A, B]}, {leaf: [A, B], q: "1"}]}}
    commands:
      - twin: {legs: [[0.6, 1], [-0.6, 1]]}

Every validation error is a :class:`ConfigError` naming the offending path,
e.g. ``commands[2].algebra.frames[0]``.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import yaml

from ecokin.algebra import EconomicObject, Expr, Leaf, One, Product, Sum, Transaction, Zero, _Const
from ecokin.kinematics import ConsumerFrame, Event, Worldline

VERSION = "ecokin/1"
COMMANDS = ("transform", "interval", "quotes", "transport", "economy", "twin", "algebra")


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@dataclass(frozen=True)
class Command:
    kind: str
    params: dict

    def __eq__(self, other):
        return isinstance(other, Command) and (self.kind, _json(self.params)) == (other.kind, _json(other.params))

    def __hash__(self):
        return hash((self.kind, _json(self.params)))


@dataclass(frozen=True)
class ScenarioConfig:
    version: str
    seed: int | None
    objects: tuple
    frames: tuple
    expressions: tuple
    commands: tuple
    base_dir: Path = Path(".")

    def __eq__(self, other):
        return isinstance(other, ScenarioConfig) and dump_config(self) == dump_config(other)

    def object_map(self) -> dict:
        return {o.id: o for o in self.objects}

    def frame_map(self) -> dict:
        return {f.label: f for f in self.frames}

    def expression_map(self) -> dict:
        return dict(self.expressions)

    def digest(self) -> str:
        return hashlib.sha256(_json(dump_config(self)).encode()).hexdigest()


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# -- scalar validators -------------------------------------------------------


def _num(x, path, *, positive=False, nonneg=False, open_unit=False) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(path, f"expected a number, got {x!r}")
    x = float(x)
    if not math.isfinite(x):
        raise ConfigError(path, f"expected a finite number, got {x!r}")
    if positive and not x > 0:
        raise ConfigError(path, f"must be positive, got {x!r}")
    if nonneg and x < 0:
        raise ConfigError(path, f"must be non-negative, got {x!r}")
    if open_unit and not abs(x) < 1:
        raise ConfigError(path, f"velocity must satisfy |v| < 1, got {x!r}")
    return x


def _int(x, path, minimum=None) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ConfigError(path, f"expected an integer, got {x!r}")
    if minimum is not None and x < minimum:
        raise ConfigError(path, f"must be >= {minimum}, got {x}")
    return x


def _list(x, path, min_len=0) -> list:
    if not isinstance(x, list):
        raise ConfigError(path, f"expected a list, got {type(x).__name__}")
    if len(x) < min_len:
        raise ConfigError(path, f"expected at least {min_len} item(s)")
    return x


def _map(x, path) -> dict:
    if not isinstance(x, dict):
        raise ConfigError(path, f"expected a mapping, got {type(x).__name__}")
    return x


def _str(x, path) -> str:
    if not isinstance(x, str) or not x:
        raise ConfigError(path, f"expected a non-empty string, got {x!r}")
    return x


def _keys(d, path, required=(), optional=()):
    for k in required:
        if k not in d:
            raise ConfigError(f"{path}.{k}", "missing required key")
    for k in d:
        if k not in required and k not in optional:
            raise ConfigError(f"{path}.{k}", "unknown key")


def _event(x, path) -> list:
    x = _list(x, path)
    if len(x) != 2:
        raise ConfigError(path, "an event is [tau, l]")
    return [_num(x[0], f"{path}[0]"), _num(x[1], f"{path}[1]")]


def _fraction(x, path) -> Fraction:
    try:
        if isinstance(x, bool):
            raise TypeError
        q = Fraction(str(x)) if isinstance(x, (str, int)) else Fraction(x).limit_denominator(10**9)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ConfigError(path, f"expected a positive rational, got {x!r}") from None
    if q <= 0:
        raise ConfigError(path, f"exponent must be positive, got {x!r}")
    return q


# -- top-level sections ------------------------------------------------------


def _parse_object(d, path) -> EconomicObject:
    d = _map(d, path)
    _keys(d, path, ("id",), ("base", "segments"))
    oid = _str(d["id"], f"{path}.id")
    base = _event(d.get("base", [0, 0]), f"{path}.base")
    segs = []
    for i, s in enumerate(_list(d.get("segments", []), f"{path}.segments")):
        sp = f"{path}.segments[{i}]"
        s = _list(s, sp)
        if len(s) != 2:
            raise ConfigError(sp, "a segment is [v, dtau]")
        segs.append((_num(s[0], f"{sp}[0]", open_unit=True), _num(s[1], f"{sp}[1]", positive=True)))
    return EconomicObject(oid, Worldline(Event(*base), tuple(segs)))


def _parse_frame(d, path) -> ConsumerFrame:
    d = _map(d, path)
    _keys(d, path, ("id",), ("v", "origin"))
    label = _str(d["id"], f"{path}.id")
    v = _num(d.get("v", 0.0), f"{path}.v", open_unit=True)
    origin = _event(d.get("origin", [0, 0]), f"{path}.origin")
    return ConsumerFrame(v, Event(*origin), label)


def parse_expr(x, path, object_ids) -> Expr:
    if x in ("zero", "0", 0) and not isinstance(x, bool):
        return Zero
    if x in ("one", "1", 1) and not isinstance(x, bool):
        return One
    d = _map(x, path)
    if "leaf" in d:
        _keys(d, path, ("leaf",), ("q",))
        pair = _list(d["leaf"], f"{path}.leaf")
        if len(pair) != 2:
            raise ConfigError(f"{path}.leaf", "a leaf is [receive, deliver]")
        for i, oid in enumerate(pair):
            _str(oid, f"{path}.leaf[{i}]")
            if object_ids is not None and oid not in object_ids:
                raise ConfigError(f"{path}.leaf[{i}]", f"unknown object id {oid!r}")
        if pair[0] == pair[1]:
            raise ConfigError(f"{path}.leaf", "transaction must exchange two distinct objects")
        return Leaf(Transaction(pair[0], pair[1]), _fraction(d.get("q", 1), f"{path}.q"))
    for key, kind in (("sum", Sum), ("product", Product)):
        if key in d:
            _keys(d, path, (key,))
            items = _list(d[key], f"{path}.{key}", min_len=1)
            return kind(tuple(parse_expr(c, f"{path}.{key}[{i}]", object_ids) for i, c in enumerate(items)))
    raise ConfigError(path, "expression node must be zero, one, or have one of: leaf, sum, product")


def dump_expr(e: Expr):
    if isinstance(e, _Const):
        return "one" if e.value else "zero"
    if isinstance(e, Leaf):
        return {"leaf": [e.txn.receive, e.txn.deliver], "q": str(e.q)}
    key = "sum" if isinstance(e, Sum) else "product"
    return {key: [dump_expr(c) for c in e.children]}


# -- command blocks ----------------------------------------------------------


def _cmd_transform(d, path, ctx):
    _keys(d, path, ("events", "v"), ("frame",))
    out = {
        "events": [_event(e, f"{path}.events[{i}]") for i, e in enumerate(_list(d["events"], f"{path}.events", 1))],
        "v": _num(d["v"], f"{path}.v", open_unit=True),
    }
    if "frame" in d:
        out["frame"] = _ref(d["frame"], f"{path}.frame", ctx["frames"])
    return out


def _cmd_interval(d, path, ctx):
    _keys(d, path, (), ("pairs", "boosts", "prices", "base"))
    out = {}
    if "pairs" in d:
        pairs = []
        for i, p in enumerate(_list(d["pairs"], f"{path}.pairs", 1)):
            pp = f"{path}.pairs[{i}]"
            p = _list(p, pp)
            if len(p) != 2:
                raise ConfigError(pp, "a pair is [event_a, event_b]")
            pairs.append([_event(p[0], f"{pp}[0]"), _event(p[1], f"{pp}[1]")])
        out["pairs"] = pairs
    if "boosts" in d:
        out["boosts"] = [_num(v, f"{path}.boosts[{i}]", open_unit=True)
                         for i, v in enumerate(_list(d["boosts"], f"{path}.boosts"))]
    if "prices" in d:
        prices = []
        for i, q in enumerate(_list(d["prices"], f"{path}.prices", 1)):
            qp = f"{path}.prices[{i}]"
            q = _list(q, qp)
            if len(q) != 4:
                raise ConfigError(qp, "prices are [a_min, a_max, b_min, b_max]")
            prices.append([_num(x, f"{qp}[{j}]", positive=True) for j, x in enumerate(q)])
        out["prices"] = prices
    if "base" in d:
        out["base"] = _base(d["base"], f"{path}.base")
    if "pairs" not in out and "prices" not in out:
        raise ConfigError(path, "needs pairs or prices")
    return out


def _base(x, path):
    if x in (2, "2"):
        return "2"
    if x == "e":
        return "e"
    raise ConfigError(path, f"log base must be 2 or e, got {x!r}")


def _cmd_quotes(d, path, ctx):
    _keys(d, path, (), ("csv", "rows", "base"))
    if ("csv" in d) == ("rows" in d):
        raise ConfigError(path, "needs exactly one of csv, rows")
    out = {}
    if "csv" in d:
        out["csv"] = _str(d["csv"], f"{path}.csv")
    else:
        rows = []
        for i, r in enumerate(_list(d["rows"], f"{path}.rows", 1)):
            rp = f"{path}.rows[{i}]"
            r = _map(r, rp)
            _keys(r, rp, ("pair_id", "a_min", "a_max", "b_min", "b_max"), ("base", "a_ref", "b_ref"))
            row = {"pair_id": _str(str(r["pair_id"]), f"{rp}.pair_id")}
            for k in ("a_min", "a_max", "b_min", "b_max", "a_ref", "b_ref"):
                if k in r:
                    row[k] = _num(r[k], f"{rp}.{k}", positive=True)
            if "base" in r:
                row["base"] = _base(r["base"], f"{rp}.base")
            rows.append(row)
        out["rows"] = rows
    if "base" in d:
        out["base"] = _base(d["base"], f"{path}.base")
    return out


def _cmd_transport(d, path, ctx):
    _keys(d, path, ("S0", "k_t", "l_AB"), ("n_A", "step", "quality_rate"))
    out = {
        "S0": _num(d["S0"], f"{path}.S0", positive=True),
        "k_t": _num(d["k_t"], f"{path}.k_t", positive=True),
        "l_AB": _num(d["l_AB"], f"{path}.l_AB", nonneg=True),
        "n_A": _num(d.get("n_A", 1.0), f"{path}.n_A", positive=True),
    }
    if d.get("step") is not None:
        out["step"] = _num(d["step"], f"{path}.step", positive=True)
        if out["l_AB"] > 0 and out["step"] > out["l_AB"]:
            raise ConfigError(f"{path}.step", f"step exceeds route length {out['l_AB']}")
    if d.get("quality_rate") is not None:
        out["quality_rate"] = _num(d["quality_rate"], f"{path}.quality_rate")
    return out


def _cmd_economy(d, path, ctx):
    _keys(d, path, ("K", "cycles"), ("init",))
    rows = _list(d["K"], f"{path}.K", 2)
    m = len(rows)
    K = []
    for i, r in enumerate(rows):
        r = _list(r, f"{path}.K[{i}]")
        if len(r) != m:
            raise ConfigError(f"{path}.K[{i}]", f"expected {m} entries")
        K.append([_num(x, f"{path}.K[{i}][{j}]", nonneg=True) for j, x in enumerate(r)])
    init = d.get("init", "balanced")
    if init != "balanced":
        init = _list(init, f"{path}.init")
        if len(init) != m:
            raise ConfigError(f"{path}.init", f"expected {m} entries")
        init = [_num(x, f"{path}.init[{i}]", nonneg=True) for i, x in enumerate(init)]
        if not any(x > 0 for x in init):
            raise ConfigError(f"{path}.init", "initial outputs must not all be zero")
    return {"K": K, "init": init, "cycles": _int(d["cycles"], f"{path}.cycles", 1)}


def _cmd_twin(d, path, ctx):
    _keys(d, path, ("legs",))
    legs = []
    for i, leg in enumerate(_list(d["legs"], f"{path}.legs", 1)):
        lp = f"{path}.legs[{i}]"
        leg = _list(leg, lp)
        if len(leg) != 2:
            raise ConfigError(lp, "a leg is [v, dtau]")
        legs.append([_num(leg[0], f"{lp}[0]", open_unit=True), _num(leg[1], f"{lp}[1]", positive=True)])
    return {"legs": legs}


def _ref(x, path, table):
    x = _str(x, path)
    if x not in table:
        raise ConfigError(path, f"unknown reference {x!r}")
    return x


def _cmd_algebra(d, path, ctx):
    _keys(d, path, (), ("frames", "expressions", "laws", "witnesses", "partition", "indistinguishable"))
    out = {}
    if "frames" in d:
        out["frames"] = [_ref(f, f"{path}.frames[{i}]", ctx["frames"])
                         for i, f in enumerate(_list(d["frames"], f"{path}.frames", 1))]
    if "expressions" in d:
        out["expressions"] = [_ref(e, f"{path}.expressions[{i}]", ctx["expressions"])
                              for i, e in enumerate(_list(d["expressions"], f"{path}.expressions", 1))]
        if "frames" not in out:
            raise ConfigError(f"{path}.frames", "required when expressions are evaluated")
    if "laws" in d:
        laws = _map(d["laws"], f"{path}.laws")
        _keys(laws, f"{path}.laws", (), ("draws",))
        out["laws"] = {"draws": _int(laws.get("draws", 1000), f"{path}.laws.draws", 1)}
    if "witnesses" in d:
        if not isinstance(d["witnesses"], bool):
            raise ConfigError(f"{path}.witnesses", "expected true or false")
        out["witnesses"] = d["witnesses"]
    if "partition" in d:
        out["partition"] = [_ref(f, f"{path}.partition[{i}]", ctx["frames"])
                            for i, f in enumerate(_list(d["partition"], f"{path}.partition", 1))]
    if "indistinguishable" in d:
        pairs = []
        for i, p in enumerate(_list(d["indistinguishable"], f"{path}.indistinguishable", 1)):
            pp = f"{path}.indistinguishable[{i}]"
            p = _list(p, pp)
            if len(p) != 2:
                raise ConfigError(pp, "expected [object_a, object_b]")
            pairs.append([_ref(p[0], f"{pp}[0]", ctx["objects"]), _ref(p[1], f"{pp}[1]", ctx["objects"])])
        out["indistinguishable"] = pairs
        if "frames" not in out:
            raise ConfigError(f"{path}.frames", "required as probe frames")
    if not out:
        raise ConfigError(path, "algebra block is empty")
    return out


_PARSERS = {
    "transform": _cmd_transform,
    "interval": _cmd_interval,
    "quotes": _cmd_quotes,
    "transport": _cmd_transport,
    "economy": _cmd_economy,
    "twin": _cmd_twin,
    "algebra": _cmd_algebra,
}


def _parse_command(d, path, ctx) -> Command:
    d = _map(d, path)
    if len(d) != 1:
        raise ConfigError(path, f"command block must have exactly one key from {', '.join(COMMANDS)}")
    (kind, body), = d.items()
    if kind not in _PARSERS:
        raise ConfigError(f"{path}.{kind}", f"unknown command; expected one of {', '.join(COMMANDS)}")
    body = {} if body is None else _map(body, f"{path}.{kind}")
    return Command(kind, _PARSERS[kind](body, f"{path}.{kind}", ctx))


# -- entry points ------------------------------------------------------------


def parse_config(data, base_dir: Path | str = ".") -> ScenarioConfig:
    data = _map(data, "$")
    _keys(data, "$", ("version",), ("seed", "objects", "frames", "expressions", "commands"))
    if data["version"] != VERSION:
        raise ConfigError("version", f"unrecognised version tag {data['version']!r}; expected {VERSION!r}")
    seed = data.get("seed")
    if seed is not None:
        seed = _int(seed, "seed", 0)

    objects, seen = [], set()
    for i, o in enumerate(_list(data.get("objects", []), "objects")):
        obj = _parse_object(o, f"objects[{i}]")
        if obj.id in seen:
            raise ConfigError(f"objects[{i}].id", f"duplicate object id {obj.id!r}")
        seen.add(obj.id)
        objects.append(obj)

    frames, fseen = [], set()
    for i, f in enumerate(_list(data.get("frames", []), "frames")):
        fr = _parse_frame(f, f"frames[{i}]")
        if fr.label in fseen:
            raise ConfigError(f"frames[{i}].id", f"duplicate frame id {fr.label!r}")
        fseen.add(fr.label)
        frames.append(fr)

    exprs, eseen = [], set()
    for i, e in enumerate(_list(data.get("expressions", []), "expressions")):
        p = f"expressions[{i}]"
        e = _map(e, p)
        _keys(e, p, ("id", "expr"))
        eid = _str(e["id"], f"{p}.id")
        if eid in eseen:
            raise ConfigError(f"{p}.id", f"duplicate expression id {eid!r}")
        eseen.add(eid)
        exprs.append((eid, parse_expr(e["expr"], f"{p}.expr", seen)))

    ctx = {"objects": seen, "frames": fseen, "expressions": eseen}
    commands = tuple(_parse_command(c, f"commands[{i}]", ctx)
                     for i, c in enumerate(_list(data.get("commands", []), "commands")))
    return ScenarioConfig(VERSION, seed, tuple(objects), tuple(frames), tuple(exprs), commands, Path(base_dir))


def load_config(path) -> ScenarioConfig:
    """Read and validate a config file. I/O problems surface as ``OSError``."""
    path = Path(path)
    text = path.read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("$", f"not valid YAML/JSON: {exc}") from None
    return parse_config(data, path.parent)


def dump_config(cfg: ScenarioConfig) -> dict:
    """Canonical plain-data form of a config."""
    out = {"version": cfg.version}
    if cfg.seed is not None:
        out["seed"] = cfg.seed
    out["objects"] = [
        {"id": o.id, "base": [o.worldline.base.tau, o.worldline.base.l],
         "segments": [[v, d] for v, d in o.worldline.segments]}
        for o in cfg.objects
    ]
    out["frames"] = [{"id": f.label, "v": f.v, "origin": [f.origin.tau, f.origin.l]} for f in cfg.frames]
    out["expressions"] = [{"id": eid, "expr": dump_expr(e)} for eid, e in cfg.expressions]
    out["commands"] = [{c.kind: json.loads(_json(c.params))} for c in cfg.commands]
    return out


def dumps_config(cfg: ScenarioConfig) -> str:
    return yaml.safe_dump(dump_config(cfg), sort_keys=False, default_flow_style=None)
