"""Execution of scenario command blocks."""
from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ecokin import algebra, kinematics, laws, scenarios
from ecokin.cli.config import Command, ConfigError, ScenarioConfig, dump_config, _json
from ecokin.cli.quotes import evaluate_quote, ingest_quotes
from ecokin.kinematics import ConsumerFrame, Event


class BlockError(Exception):
    """A command block failed at run time; carries the block path."""

    def __init__(self, path: str, exc: BaseException):
        super().__init__(f"{path}: {exc}")
        self.path = path
        self.cause = exc


@dataclass
class BlockResult:
    index: int
    command: Command
    rows: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    plot: list = field(default_factory=list)  # (series, x, y)


@dataclass
class Envelope:
    digest: str
    seed: int
    blocks: list


# -- handlers ----------------------------------------------------------------


def _transform(cfg, p, res, rng, opts):
    v = p["v"]
    frame = cfg.frame_map()[p["frame"]] if "frame" in p else None
    for i, (tau, l) in enumerate(p["events"]):
        e = Event(tau, l)
        b = kinematics.boost_event(e, v)
        r = kinematics.radar_map(e)
        rb = kinematics.boost_radar(r, v)
        g = kinematics.galilean_boost(e, v)
        row = {"event": i, "tau": tau, "l": l, "v": v,
               "boost_tau": b.tau, "boost_l": b.l,
               "radar_min": r.tau_min, "radar_max": r.tau_max,
               "boost_radar_min": rb.tau_min, "boost_radar_max": rb.tau_max,
               "galilean_tau": g.tau, "galilean_l": g.l}
        if frame is not None:
            m = kinematics.ideal_measure(e, frame)
            row.update({"frame": frame.label, "ideal_purchase": m.tau_min, "ideal_sale": m.tau_max})
        res.rows.append(row)


def _interval(cfg, p, res, rng, opts):
    for i, (a, b) in enumerate(p.get("pairs", [])):
        ea, eb = Event(*a), Event(*b)
        r = kinematics.interval(ea, eb)
        res.rows.append({"kind": "events", "pair": i, "v": 0.0, "squared": r.squared,
                         "magnitude": r.magnitude, "classification": r.classification})
        for v in p.get("boosts", []):
            rv = kinematics.interval(kinematics.boost_event(ea, v), kinematics.boost_event(eb, v))
            res.rows.append({"kind": "events", "pair": i, "v": v, "squared": rv.squared,
                             "magnitude": rv.magnitude, "classification": rv.classification})
    base = p.get("base", opts["log_base"])
    for i, q in enumerate(p.get("prices", [])):
        r = kinematics.interval_from_prices(*q, base=base)
        res.rows.append({"kind": "prices", "pair": i, "base": base, "squared": r.squared,
                         "magnitude": r.magnitude, "classification": r.classification})


def _quote_row(q):
    return {"pair_id": q.pair_id, "line": q.line, "base": q.base, "side_a": q.side_a,
            "side_b": q.side_b, "squared": q.squared, "magnitude": q.magnitude,
            "classification": q.classification, "disagreement": q.disagreement}


def _quotes(cfg, p, res, rng, opts):
    base = p.get("base", opts["log_base"])
    if "csv" in p:
        path = Path(p["csv"])
        if not path.is_absolute():
            path = cfg.base_dir / path
        try:
            results, errors = ingest_quotes(path, base)
        except ValueError as exc:
            raise ConfigError("csv", str(exc)) from None
        for err in errors:
            res.warnings.append(f"line {err.line}: {err.message}")
    else:
        results = [evaluate_quote(r, i + 1, base) for i, r in enumerate(p["rows"])]
    for q in results:
        res.rows.append(_quote_row(q))
        if q.disagreement > 0.02:
            res.warnings.append(f"{q.pair_id}: side estimates disagree by {q.disagreement:.2%}")


def _transport(cfg, p, res, rng, opts):
    params = scenarios.TransportParams(p["S0"], p["k_t"], p["l_AB"], p["n_A"], p.get("step"))
    rep = scenarios.simulate_transport(params)
    row = {"n_A": params.n_A, "n_B": rep.n_B, "n_B_closed_form": rep.n_B_closed_form,
           "rel_error": rep.rel_error, "A_min": rep.A_min, "A_max": rep.A_max, "A0": rep.A0,
           "econ_distance": rep.econ_distance, "c_econ": rep.c_econ}
    if "quality_rate" in p:
        ok = scenarios.speed_limit_check(p["quality_rate"], rep.c_econ)
        row["quality_rate"] = p["quality_rate"]
        row["feasible"] = ok
        if not ok:
            raise scenarios.InfeasibleError(
                f"speed-limit violation: |dl/dln n| = {abs(p['quality_rate'])!r} >= c_econ = {rep.c_econ!r}")
    res.rows.append(row)
    stride = max(1, len(rep.profile_x) // 200)
    for x, n in zip(rep.profile_x[::stride], rep.profile_n[::stride]):
        res.plot.append(("n_of_x", float(x), float(n)))


def _economy(cfg, p, res, rng, opts):
    K = np.array(p["K"])
    lam = vec = None
    try:
        lam, vec = scenarios.balanced_state(K)
    except ValueError as exc:
        if p["init"] == "balanced":
            raise
        res.warnings.append(f"no balanced state: {exc}")
    init = vec if p["init"] == "balanced" else np.array(p["init"])
    if lam is not None:
        res.rows.append({"kind": "balanced", "lambda": lam,
                         **{f"eigvec_{i}": float(x) for i, x in enumerate(vec)}})
    traj = scenarios.simulate_economy(K, init, p["cycles"])
    prev = None
    for s in traj.states:
        row = {"kind": "cycle", "cycle": s.cycle, "collapsed": s.collapsed, "volume": s.volume,
               "econ_time": s.econ_time,
               "volume_ratio": (s.volume / prev if prev else None)}
        row.update({f"output_{i}": float(x) for i, x in enumerate(s.outputs)})
        row.update({f"proportion_{i}_{j}": r for (i, j), r in sorted(s.proportions.items())})
        res.rows.append(row)
        prev = s.volume
        for i, x in enumerate(s.outputs):
            res.plot.append((f"output_{i}", float(s.cycle), float(x)))
        if len(s.outputs) >= 2:
            res.plot.append(("phase", float(s.outputs[0]), float(s.outputs[1])))
    if traj.collapsed:
        res.warnings.append(f"economy collapsed at cycle {traj.collapse_cycle}")


def _twin(cfg, p, res, rng, opts):
    it = scenarios.TwinItinerary(tuple(tuple(leg) for leg in p["legs"]))
    rep = scenarios.simulate_twin(it)
    res.rows.append({"home": rep.home, "traveler": rep.traveler, "lag": rep.lag,
                     "separation": rep.separation, "max_separation": rep.max_separation})
    for e in it.worldline().vertices():
        res.plot.append(("traveler", e.tau, e.l))
    res.plot.append(("home", 0.0, 0.0))
    res.plot.append(("home", rep.home, 0.0))


def _algebra(cfg, p, res, rng, opts):
    objects = cfg.object_map()
    frames = [cfg.frame_map()[f] for f in p.get("frames", [])]
    exprs = cfg.expression_map()
    for eid in p.get("expressions", []):
        canon = algebra.canonicalize(exprs[eid])
        for f in frames:
            v = algebra.eval_expression(f, exprs[eid], objects)
            res.rows.append({"kind": "eval", "expression": eid, "frame": f.label,
                             "canonical": str(canon), "verdict": v.value})
    if "laws" in p:
        pool = list(objects.values()) if len(objects) >= 2 else None
        rep = laws.check_laws(rng, p["laws"]["draws"], pool)
        for name in laws.LAWS:
            res.rows.append({"kind": "law", "law": name, "passed": rep.passed[name],
                             "failed": rep.failed[name]})
        if rep.skipped_ties:
            res.warnings.append(f"complement law skipped on {rep.skipped_ties} tied draw(s)")
        if not rep.ok:
            res.warnings.append("algebra law violations found")
    if p.get("witnesses"):
        w = laws.witnesses()
        res.rows.append({"kind": "witness", "single": w["single"].value,
                         "product_square": w["product_square"].value,
                         "sum_double": w["sum_double"].value,
                         "square_differs": w["square_differs"], "sum_differs": w["sum_differs"]})
    for label in p.get("partition", []):
        f = cfg.frame_map()[label]
        classes = algebra.partition_equivalents(f, list(objects.values()))
        for ci, members in enumerate(classes):
            res.rows.append({"kind": "partition", "frame": label, "class": ci,
                             "members": " ".join(o.id for o in members)})
    for a, b in p.get("indistinguishable", []):
        probes = [o for o in objects.values() if o.id not in (a, b)]
        same = algebra.indistinguishable(objects[a], objects[b], frames, probes) if probes else True
        res.rows.append({"kind": "indistinguishable", "a": a, "b": b, "result": same})


HANDLERS = {
    "transform": _transform,
    "interval": _interval,
    "quotes": _quotes,
    "transport": _transport,
    "economy": _economy,
    "twin": _twin,
    "algebra": _algebra,
}


def _file_inputs(cfg: ScenarioConfig) -> list:
    out = []
    for c in cfg.commands:
        if c.kind == "quotes" and "csv" in c.params:
            path = Path(c.params["csv"])
            out.append(path if path.is_absolute() else cfg.base_dir / path)
    return out


def input_digest(cfg: ScenarioConfig) -> str:
    h = hashlib.sha256(_json(dump_config(cfg)).encode())
    for path in _file_inputs(cfg):
        try:
            h.update(path.read_bytes())
        except OSError:
            pass
    return h.hexdigest()


def run_block(cfg: ScenarioConfig, index: int, seed: int, opts: dict) -> BlockResult:
    cmd = cfg.commands[index]
    res = BlockResult(index, cmd)
    # per-block stream: results do not depend on execution order
    rng = np.random.default_rng([seed, index])
    try:
        HANDLERS[cmd.kind](cfg, cmd.params, res, rng, opts)
    except OSError:
        raise
    except (ValueError, ArithmeticError, KeyError) as exc:
        raise BlockError(f"commands[{index}].{cmd.kind}", exc) from exc
    return res


def run(cfg: ScenarioConfig, seed: int = 0, log_base: str = "2", jobs: int = 1) -> Envelope:
    opts = {"log_base": log_base}
    idx = range(len(cfg.commands))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            blocks = list(pool.map(lambda i: run_block(cfg, i, seed, opts), idx))
    else:
        blocks = [run_block(cfg, i, seed, opts) for i in idx]
    return Envelope(input_digest(cfg), seed, blocks)
