"""Corpus benchmarks: run the distributed algorithms over seeds and compare with the oracle."""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Iterable, Iterator, Sequence

from .distributed import RunOutcome, SearchParams, classify, find_cut_baseline_gather, find_vertex_cut, kappa_one_cut
from .graph import GenSpec, Graph, generate, stats
from .oracle import has_cut_at_most
from .sim import SimConfig, default_max_rounds

ALGOS = ("main", "baseline", "kappa1")
MAX_ROUNDS_ENV = "VCUT_MAX_ROUNDS"
FAMILY_ALIASES = {"planted": "planted_separator"}


class CorpusError(ValueError):
    pass


def envelope_ratio(rounds: int, n: int, diameter: int, kappa: int) -> float:
    """rounds / (kappa^3 (D + sqrt n) (log2 n)^3)."""
    return rounds / (kappa ** 3 * (diameter + math.sqrt(n)) * math.log2(n) ** 3)


def max_rounds_for(n: int, diameter: int, kappa: int, algo: str, m: int = 0) -> int:
    env = os.environ.get(MAX_ROUNDS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError as exc:
            raise CorpusError(f"{MAX_ROUNDS_ENV} must be an integer, got {env!r}") from exc
        if value < 1:
            raise CorpusError(f"{MAX_ROUNDS_ENV} must be >= 1")
        return value
    if algo == "baseline":
        # the gather baseline is O(m + D) and outside the envelope
        return 10 * (m + n) + 1000
    return default_max_rounds(n, diameter, kappa)


# ---------------------------------------------------------------- corpus

@dataclass(frozen=True)
class Instance:
    spec: GenSpec
    kappas: tuple[int, ...]
    label: str
    seeds: int | None = None  # overrides the corpus seed count


_SPEC_FIELDS = {f.name for f in fields(GenSpec)}
_INSTANCE_KEYS = _SPEC_FIELDS | {"kappas", "kappa", "graph_seed", "label", "seeds", "a_frac"}


def _spec_from(obj: dict) -> GenSpec:
    kw = {k: v for k, v in obj.items() if k in _SPEC_FIELDS}
    if "graph_seed" in obj:
        kw["seed"] = obj["graph_seed"]
    kw["family"] = FAMILY_ALIASES.get(kw.get("family", ""), kw.get("family", ""))
    return GenSpec(**kw)


def load_corpus(obj: dict) -> tuple[list[Instance], dict]:
    """Parse a corpus document; list-valued ``n`` or ``graph_seed`` expand to several instances."""
    if not isinstance(obj, dict):
        raise CorpusError("corpus must be a JSON object")
    items = obj.get("instances", [])
    if not isinstance(items, list):
        raise CorpusError("'instances' must be a list")
    out: list[Instance] = []
    for i, item in enumerate(items):
        if not isinstance(item, dict) or "family" not in item:
            raise CorpusError(f"instance {i} needs a family")
        unknown = set(item) - _INSTANCE_KEYS
        if unknown:
            raise CorpusError(f"instance {i}: unknown keys {sorted(unknown)}")
        kappas = item.get("kappas", item.get("kappa"))
        if kappas is None:
            raise CorpusError(f"instance {i} needs kappas")
        if isinstance(kappas, int):
            kappas = [kappas]
        ns = item.get("n")
        ns = ns if isinstance(ns, list) else [ns]
        gseeds = item.get("graph_seed", item.get("seed", 0))
        gseeds = gseeds if isinstance(gseeds, list) else [gseeds]
        for n in ns:
            for gs in gseeds:
                base = dict(item)
                base.pop("seed", None)
                base["graph_seed"] = gs
                if n is None:
                    base.pop("n", None)
                else:
                    base["n"] = n
                    if "a_frac" in item:
                        base["a"] = max(1, int(n * item["a_frac"]))
                try:
                    spec = _spec_from(base)
                except TypeError as exc:
                    raise CorpusError(f"instance {i}: {exc}") from exc
                label = item.get("label", spec.family)
                out.append(Instance(spec, tuple(int(k) for k in kappas), label, item.get("seeds")))
    meta = {k: obj[k] for k in ("name", "seeds", "base_seed", "algos") if k in obj}
    return out, meta


# ---------------------------------------------------------------- records

@dataclass
class BenchRecord:
    graph: str
    family: str
    n: int
    m: int
    D: int
    max_degree: int
    kappa: int
    seed: int
    algo: str
    verdict: str  # "cut", "none" or "timeout"
    cut: list[int]
    cut_size: int
    verified: bool | None  # verify_cut on a reported cut, None otherwise
    oracle_verdict: str
    match: bool
    direction: str
    rounds_used: int
    total_messages: int
    envelope_ratio: float
    trace_hash: str
    budget_overruns: list[str] = field(default_factory=list)
    agreed: bool = True  # every node output the same encoded verdict

    @property
    def key(self) -> tuple:
        return (self.graph, self.kappa, self.algo, self.seed)

    def to_dict(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_dict(d: dict) -> "BenchRecord":
        return BenchRecord(**d)


def record_for(g: Graph, st, descriptor: str, family: str, kappa: int, seed: int, algo: str,
               out: RunOutcome, oracle) -> BenchRecord:
    verified, match, direction = classify(g, out.result, oracle)
    res = out.result
    return BenchRecord(
        graph=descriptor, family=family, n=g.n, m=g.m, D=st.diameter, max_degree=st.max_degree,
        kappa=kappa, seed=seed, algo=algo, verdict=res.kind, cut=list(res.vertices), cut_size=len(res.vertices),
        verified=verified, oracle_verdict=oracle.kind, match=match, direction=direction,
        rounds_used=out.metrics.rounds_used, total_messages=out.metrics.total_messages,
        envelope_ratio=envelope_ratio(out.metrics.rounds_used, g.n, st.diameter, kappa),
        trace_hash=f"{out.metrics.trace_hash:016x}",
        budget_overruns=[p.name for p in out.budget_overruns],
        agreed=out.agreed,
    )


def run_one(g: Graph, kappa: int, seed: int, algo: str, max_rounds: int, sp: SearchParams = SearchParams()) -> RunOutcome:
    if algo not in ALGOS:
        raise CorpusError(f"unknown algo {algo!r}; expected one of {', '.join(ALGOS)}")
    cfg = SimConfig(max_rounds=max_rounds, global_seed=seed)
    if algo == "main":
        return find_vertex_cut(g, kappa, cfg, sp)
    if algo == "kappa1":
        return kappa_one_cut(g, cfg, sp)
    return find_cut_baseline_gather(g, kappa, cfg)


def run_instance(inst: Instance, seeds: Sequence[int], algos: Sequence[str],
                 skip: frozenset = frozenset()) -> list[BenchRecord]:
    g = generate(inst.spec)
    st = stats(g)
    desc = inst.spec.descriptor()
    recs = []
    for kappa in inst.kappas:
        if not 1 <= kappa <= g.n - 2:
            raise CorpusError(f"{desc}: kappa {kappa} outside [1, n-2]")
        oracle = has_cut_at_most(g, kappa)
        for algo in algos:
            if algo == "kappa1" and kappa != 1:
                continue
            mr = max_rounds_for(g.n, st.diameter, kappa, algo, g.m)
            for s in seeds:
                if (desc, kappa, algo, s) in skip:
                    continue
                out = run_one(g, kappa, s, algo, mr)
                recs.append(record_for(g, st, desc, inst.label, kappa, s, algo, out, oracle))
    return recs


# ---------------------------------------------------------------- report

def _rate(bad: int, total: int) -> float:
    return bad / total if total else 0.0


def summarize(records: Sequence[BenchRecord]) -> dict:
    """Summary numbers; all of them are recomputable from the records."""
    enveloped = [r for r in records if r.algo != "baseline"]
    fam: dict[str, dict[str, Any]] = {}
    for r in records:
        f = fam.setdefault(r.family, {"runs": 0, "mismatches": 0, "max_envelope_ratio": 0.0})
        f["runs"] += 1
        f["mismatches"] += 0 if r.match else 1
        if r.algo != "baseline":
            f["max_envelope_ratio"] = max(f["max_envelope_ratio"], r.envelope_ratio)
    for f in fam.values():
        f["mismatch_rate"] = _rate(f["mismatches"], f["runs"])
    by_n: dict[str, float] = {}
    for r in enveloped:
        by_n[str(r.n)] = max(by_n.get(str(r.n), 0.0), r.envelope_ratio)
    algos = {}
    for r in records:
        a = algos.setdefault(r.algo, {"runs": 0, "mismatches": 0})
        a["runs"] += 1
        a["mismatches"] += 0 if r.match else 1
    for a in algos.values():
        a["mismatch_rate"] = _rate(a["mismatches"], a["runs"])
    mism = sum(0 if r.match else 1 for r in records)
    return {
        "runs": len(records),
        "mismatches": mism,
        "mismatch_rate": _rate(mism, len(records)),
        "max_envelope_ratio": max((r.envelope_ratio for r in enveloped), default=0.0),
        "timeout_count": sum(r.verdict == "timeout" for r in records),
        "unverified_cuts": sum(r.verified is False for r in records),
        "false_negatives": sum(r.direction == "false_negative" for r in records),
        "false_positives": sum(r.direction == "false_positive" for r in records),
        "budget_overruns": sum(1 for r in records if r.budget_overruns),
        "disagreements": sum(not r.agreed for r in records),
        "per_family": dict(sorted(fam.items())),
        "per_algo": dict(sorted(algos.items())),
        "max_envelope_ratio_by_n": dict(sorted(by_n.items(), key=lambda kv: int(kv[0]))),
    }


@dataclass
class BenchReport:
    records: list[BenchRecord]
    summary: dict

    @staticmethod
    def of(records: Iterable[BenchRecord]) -> "BenchReport":
        recs = sorted(records, key=lambda r: (r.family, r.n, r.graph, r.kappa, r.algo, r.seed))
        return BenchReport(recs, summarize(recs))

    def to_json(self) -> dict:
        return {"records": [r.to_dict() for r in self.records], "summary": self.summary}

    @staticmethod
    def from_json(obj: dict) -> "BenchReport":
        return BenchReport([BenchRecord.from_dict(r) for r in obj["records"]], obj["summary"])

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)


def read_stream(path: str) -> list[BenchRecord]:
    recs = []
    if os.path.exists(path):
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if line:
                    try:
                        recs.append(BenchRecord.from_dict(json.loads(line)))
                    except (json.JSONDecodeError, TypeError):
                        break  # a torn final line from an interrupted run
    return recs


def _job(args) -> list[BenchRecord]:
    inst, seeds, algos, skip = args
    return run_instance(inst, seeds, algos, skip)


def iter_records(instances: Sequence[Instance], seeds: int, base_seed: int = 0, algos: Sequence[str] = ("main",),
                 skip: frozenset = frozenset(), jobs: int = 1) -> Iterator[list[BenchRecord]]:
    """Per-instance record batches, in corpus order."""
    work = []
    for inst in instances:
        t = inst.seeds if inst.seeds is not None else seeds
        work.append((inst, [base_seed + i for i in range(t)], tuple(algos), skip))
    if jobs <= 1:
        for w in work:
            yield _job(w)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            yield from ex.map(_job, work)


def run_bench(instances: Sequence[Instance], seeds: int, base_seed: int = 0, algos: Sequence[str] = ("main",),
              stream: str | None = None, jobs: int = 1) -> BenchReport:
    """Run every instance x kappa x algo x seed; with ``stream`` records are appended per
    instance as JSON lines and records already present there are reused."""
    done = read_stream(stream) if stream else []
    skip = frozenset(r.key for r in done)
    records = list(done)
    fh = open(stream, "a") if stream else None
    try:
        for batch in iter_records(instances, seeds, base_seed, algos, skip, jobs):
            if fh is not None and batch:
                fh.write("".join(json.dumps(r.to_dict(), sort_keys=True) + "\n" for r in batch))
                fh.flush()
            records.extend(batch)
    finally:
        if fh is not None:
            fh.close()
    return BenchReport.of(records)
