"""Command-line front end.

Usage::

    keanelab --config run.json [--out DIR] [--format json|csv] [--threads N]

The config is a JSON object naming a ``command`` and a ``sequence``; big
integers may be given as decimal strings and rationals as ``"p/q"``.  Exit
status is 0 when every asserted check holds, 2 when one fails and 1 on a
usage or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from . import __version__
from .analysis import (CLAIMS, CSV_HEADER, KeaneTower, PreconditionError, SegmentSplitError,
                       VerificationReport, ergodicity_gap, orbit_geometry,
                       verify_claim, verify_landing_pattern)
from .dimension import (RecurrenceSeries, check_theorem2_condition, check_theorem3_condition, cover_terms,
                        critical_exponent, recurrence_statistic, separation_check,
                        theorem4_threshold)
from .iet import DEFAULT_STEP_BUDGET, InductionBudgetError
from .keane import (DEFAULT_BIT_BUDGET, KINDS, ParamSeq, SequenceError, column_mass,
                    generate, length_vector, validate_sequence)
from .numerics import decimal_str, int_str, parse_int, parse_rat, rat_str

COMMANDS = ("generate", "validate", "lengths", "induce", "verify", "geometry",
            "ergodicity", "cover", "conditions", "recurrence")

COMMON_KEYS = {"command", "sequence", "step_budget", "bit_budget"}
COMMAND_KEYS = {
    "generate": set(),
    "validate": set(),
    "lengths": {"K"},
    "induce": {"K", "level", "levels"},
    "verify": {"K", "claims", "levels"},
    "geometry": {"K", "level", "levels"},
    "ergodicity": {"K_min", "K_max"},
    "cover": {"K", "s", "L", "tolerance"},
    "conditions": {"r", "theorem", "levels", "proof_levels"},
    "recurrence": {"K", "level", "levels", "horizon", "beta"},
}
NEEDS_K = {"lengths", "induce", "verify", "geometry", "cover", "recurrence"}
LEVEL_COMMANDS = {"induce", "geometry", "recurrence"}


class ConfigError(ValueError):
    def __init__(self, errors: Sequence[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


@dataclass
class RunConfig:
    command: str
    sequence: ParamSeq
    K: Optional[int]
    options: Dict[str, Any]
    echo: Dict[str, Any]
    step_budget: int = DEFAULT_STEP_BUDGET
    bit_budget: int = DEFAULT_BIT_BUDGET


def _parse_sequence(raw, bit_budget, errors) -> Optional[ParamSeq]:
    if not isinstance(raw, dict):
        errors.append("sequence must be an object")
        return None
    unknown = set(raw) - {"kind", "depth", "pairs", "r"}
    if unknown:
        errors.append(f"unknown sequence keys: {sorted(unknown)}")
        return None
    try:
        if "pairs" in raw:
            if "kind" in raw and raw["kind"] != "explicit":
                errors.append("explicit pairs take no generator kind")
                return None
            pairs = tuple((parse_int(m), parse_int(n)) for m, n in raw["pairs"])
            return ParamSeq(pairs, "explicit")
        kind = raw.get("kind")
        if kind not in KINDS or kind == "explicit":
            errors.append(f"sequence kind must be one of {list(KINDS[:-1])}, got {kind!r}")
            return None
        if "depth" not in raw:
            errors.append("sequence depth is required")
            return None
        depth = parse_int(raw["depth"])
        r = parse_rat(raw["r"]) if "r" in raw else None
        return generate(kind, depth, r=r, bit_budget=bit_budget)
    except (SequenceError, ValueError, TypeError) as exc:
        errors.append(f"sequence: {exc}")
        return None


def _int_list(value, name, errors) -> Optional[List[int]]:
    try:
        if isinstance(value, list):
            return [parse_int(v) for v in value]
        return [parse_int(value)]
    except ValueError as exc:
        errors.append(f"{name}: {exc}")
        return None


def parse_config(document: str) -> RunConfig:
    """Validate a JSON config; every problem found is listed in ConfigError."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"malformed JSON: {exc}"]) from exc
    if not isinstance(doc, dict):
        raise ConfigError(["config must be a JSON object"])
    errors: List[str] = []
    command = doc.get("command")
    if command not in COMMANDS:
        raise ConfigError([f"command must be one of {list(COMMANDS)}, got {command!r}"])
    unknown = set(doc) - COMMON_KEYS - COMMAND_KEYS[command]
    if unknown:
        errors.append(f"unknown keys for {command}: {sorted(unknown)}")

    def int_opt(name, default=None, minimum=None):
        if name not in doc:
            return default
        try:
            v = parse_int(doc[name])
        except ValueError as exc:
            errors.append(f"{name}: {exc}")
            return None
        if minimum is not None and v < minimum:
            errors.append(f"{name} must be >= {minimum}, got {v}")
        return v

    def rat_opt(name, default=None):
        if name not in doc:
            return default
        try:
            return parse_rat(doc[name])
        except ValueError as exc:
            errors.append(f"{name}: {exc}")
            return None

    step_budget = int_opt("step_budget", DEFAULT_STEP_BUDGET, 1)
    bit_budget = int_opt("bit_budget", DEFAULT_BIT_BUDGET, 1)
    seq = None
    if "sequence" not in doc:
        errors.append("sequence is required")
    else:
        seq = _parse_sequence(doc["sequence"], bit_budget or DEFAULT_BIT_BUDGET, errors)

    K = int_opt("K", None, 1)
    if command in NEEDS_K and "K" not in doc:
        errors.append(f"{command} needs K")
    if seq is not None and K is not None and K > seq.depth:
        errors.append(f"K={K} exceeds sequence depth {seq.depth}")
    if K is not None and command in NEEDS_K and K < 2:
        errors.append("K must be at least 2")

    opts: Dict[str, Any] = {}
    if command in LEVEL_COMMANDS or command == "verify":
        if "level" in doc and "levels" in doc:
            errors.append("give level or levels, not both")
        raw = doc.get("levels", doc.get("level"))
        levels = _int_list(raw, "levels", errors) if raw is not None else None
        if levels is not None and K is not None:
            lowest = 1 if command == "induce" else 0
            for lv in levels:
                if lv < lowest or lv + 2 > K:
                    errors.append(f"level {lv} requires K >= level+2 and level >= {lowest} (K={K})")
        opts["levels"] = levels
    if command == "verify":
        claims = doc.get("claims", list(CLAIMS))
        if not isinstance(claims, list) or any(c not in CLAIMS for c in claims):
            errors.append(f"claims must be a list drawn from {list(CLAIMS)}")
        opts["claims"] = claims
    if command == "ergodicity":
        opts["K_min"] = int_opt("K_min", 1, 1)
        opts["K_max"] = int_opt("K_max", seq.depth if seq else None, 1)
        if seq is not None and opts["K_max"] is not None and opts["K_max"] > seq.depth:
            errors.append(f"K_max exceeds sequence depth {seq.depth}")
    if command == "cover":
        s = rat_opt("s", Fraction(1))
        if s is not None and not 0 < s <= 1:
            errors.append(f"s must lie in (0, 1], got {s}")
        opts["s"] = s
        opts["L"] = int_opt("L", 1, 1)
        if K is not None and opts["L"] is not None and opts["L"] > K - 2:
            errors.append("L must be <= K-2")
        tol = rat_opt("tolerance")
        if tol is not None and tol <= 0:
            errors.append("tolerance must be positive")
        if tol is not None and K is not None and K < 4:
            errors.append("the critical exponent needs K >= 4")
        opts["tolerance"] = tol
    if command == "conditions":
        r = rat_opt("r")
        if r is None and "r" not in doc:
            errors.append("conditions needs r")
        elif r is not None and r <= 0:
            errors.append("r must be positive")
        opts["r"] = r
        theorem = str(doc.get("theorem", "both"))
        if theorem not in ("2", "3", "both"):
            errors.append("theorem must be '2', '3' or 'both'")
        opts["theorem"] = theorem
        raw = doc.get("levels")
        levels = _int_list(raw, "levels", errors) if raw is not None else None
        if seq is not None:
            levels = levels if levels is not None else list(range(1, seq.depth))
            bad = [k for k in levels if not 1 <= k < seq.depth]
            if bad:
                errors.append(f"condition levels must lie in 1..{seq.depth - 1}, got {bad}")
        opts["levels"] = levels
        opts["proof_levels"] = int_opt("proof_levels", 8, 1)
    if command == "recurrence":
        opts["horizon"] = int_opt("horizon", None, 0)
        beta = rat_opt("beta", Fraction(0))
        if beta is not None and beta < 0:
            errors.append("beta must be non-negative")
        opts["beta"] = beta

    if errors:
        raise ConfigError(errors)
    return RunConfig(command, seq, K, opts, doc, step_budget, bit_budget)


# -- commands -----------------------------------------------------------------


@dataclass
class Outcome:
    results: Any
    ok: bool
    csv_header: List[str]
    csv_rows: List[list] = field(default_factory=list)


def _pmap(fn: Callable, items, threads: int) -> list:
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _validation_reports(seq: ParamSeq) -> List[VerificationReport]:
    v = validate_sequence(seq)
    reps = [VerificationReport("T1_N1", seq.kind, 1, None, Fraction(v.n1), ">=", Fraction(10))]
    for c in v.levels:
        k = c.k
        reps.append(VerificationReport("T1_LOWER", seq.kind, k, None, Fraction(seq.m(k)), ">=",
                                       Fraction(3 * (seq.n(k) + 1))))
        if c.upper_ok is not None:
            reps.append(VerificationReport("T1_UPPER", seq.kind, k, None, Fraction(seq.m(k)), "<=",
                                           Fraction(seq.n(k + 1) + 1, 2)))
    return reps


def _cmd_generate(cfg, threads):
    seq = cfg.sequence
    return Outcome({"sequence": seq.to_json(), "validation": validate_sequence(seq).to_json()},
                   True, ["k", "m", "n"],
                   [[k, int_str(m), int_str(n)] for k, (m, n) in enumerate(seq.pairs, 1)])


def _cmd_validate(cfg, threads):
    v = validate_sequence(cfg.sequence)
    reps = _validation_reports(cfg.sequence)
    return Outcome({"validation": v.to_json(), "checks": [r.to_json() for r in reps]},
                   v.ok, CSV_HEADER, [r.csv_row() for r in reps])


def _cmd_lengths(cfg, threads):
    vec = length_vector(cfg.sequence, cfg.K)
    return Outcome({"K": cfg.K, "lengths": [rat_str(x) for x in vec],
                    "lengths_decimal": [decimal_str(x) for x in vec]},
                   True, ["i", "length", "length_decimal"],
                   [[i, rat_str(x), decimal_str(x)] for i, x in enumerate(vec, 1)])


def _levels(cfg, lowest=1):
    return cfg.options["levels"] if cfg.options.get("levels") is not None else list(range(lowest, cfg.K - 1))


def _cmd_induce(cfg, threads):
    tower = KeaneTower(cfg.sequence, cfg.K, cfg.step_budget)
    reps = [verify_landing_pattern(cfg.sequence, cfg.K, k, tower=tower) for k in _levels(cfg)]
    return Outcome({"landing_patterns": [r.to_json() for r in reps]},
                   all(r.holds for r in reps), ["k", "K", "holds", "mismatches"],
                   [[r.k, r.K, r.holds, len(r.mismatches)] for r in reps])


def _cmd_verify(cfg, threads):
    seq, K = cfg.sequence, cfg.K
    levels = _levels(cfg)
    jobs = [(c, k) for c in cfg.options["claims"] for k in levels]
    reps = _pmap(lambda job: verify_claim(job[0], seq, job[1], K), jobs, threads)
    return Outcome({"reports": [r.to_json() for r in reps]}, all(r.holds for r in reps),
                   CSV_HEADER, [r.csv_row() for r in reps])


def _cmd_geometry(cfg, threads):
    tower = KeaneTower(cfg.sequence, cfg.K, cfg.step_budget)
    geoms = [orbit_geometry(cfg.sequence, cfg.K, k, cfg.step_budget, tower=tower)
             for k in _levels(cfg, lowest=0)]
    rows = [[g.k, g.K, g.count,
             "" if g.min_gap is None else rat_str(Fraction(g.min_gap, g.den)),
             rat_str(g.min_other), g.holds] for g in geoms]
    return Outcome({"geometry": [g.to_json() for g in geoms]}, all(g.holds for g in geoms),
                   ["k", "K", "count", "min_gap", "min_other_length", "holds"], rows)


def _cmd_ergodicity(cfg, threads):
    seq = cfg.sequence
    rows, out, ok = [], [], True
    for K in range(cfg.options["K_min"], cfg.options["K_max"] + 1):
        gap = ergodicity_gap(seq, K)
        entry = gap.to_json()
        entry["freq2_at_least_third"] = gap.freq2 >= Fraction(1, 3)
        if K >= 2:
            ok = ok and entry["freq2_at_least_third"]
        if K < seq.depth:
            bound = Fraction(2 * seq.m(K), (seq.n(K + 1) + 1) * (seq.n(K) + 1))
            entry["freq3_decay_bound"] = rat_str(bound)
            entry["freq3_within_decay_bound"] = gap.freq3 <= bound
        out.append(entry)
        rows.append([K, rat_str(gap.freq2), rat_str(gap.freq3),
                     decimal_str(gap.freq2), decimal_str(gap.freq3)])
    return Outcome({"series": out, "asserted": "freq2 >= 1/3 for K >= 2"}, ok,
                   ["K", "freq2", "freq3", "freq2_decimal", "freq3_decimal"], rows)


def _cmd_cover(cfg, threads):
    o = cfg.options
    series = cover_terms(cfg.sequence, cfg.K, o["s"], o["L"])
    results = {"cover": series.to_json()}
    ok = True
    if o["s"] == 1:
        ok = all(t.power <= 1 for t in series.terms)
        results["asserted"] = "t_k(1) <= 1 for every k"
    if o["tolerance"] is not None:
        results["critical_exponent"] = critical_exponent(cfg.sequence, cfg.K, o["tolerance"]).to_json()
    return Outcome(results, ok, series.csv_header, series.csv_rows())


def _cmd_conditions(cfg, threads):
    seq, o = cfg.sequence, cfg.options
    r = o["r"]

    def at(k):
        reps = []
        if o["theorem"] in ("2", "both"):
            reps.append(check_theorem2_condition(seq, r, k))
        if o["theorem"] in ("3", "both"):
            reps.extend(check_theorem3_condition(seq, r, k))
        return reps

    reps = [rep for group in _pmap(at, o["levels"], threads) for rep in group]
    results = {"r": rat_str(r), "reports": [x.to_json() for x in reps]}
    if seq.kind == "theorem4":
        threshold, proof = theorem4_threshold(o["proof_levels"])
        results["theorem4_proof_inequality"] = {
            "threshold": threshold,
            "reports": [{"k": p.k, "holds": p.holds,
                         "lhs_bits": p.lhs.numerator.bit_length(),
                         "rhs_bits": p.rhs.numerator.bit_length()} for p in proof],
        }
    return Outcome(results, all(x.holds for x in reps), CSV_HEADER, [x.csv_row() for x in reps])


def _cmd_recurrence(cfg, threads):
    seq, K, o = cfg.sequence, cfg.K, cfg.options
    levels = o["levels"] if o.get("levels") is not None else [1]
    tower = KeaneTower(seq, K, cfg.step_budget)
    out, rows, ok = [], [], True
    for k in levels:
        sep, _ = separation_check(seq, K, k, cfg.step_budget, tower=tower)
        left, length = tower.level(k).subinterval(2)
        x = left + length / 2
        horizon = o["horizon"] if o["horizon"] is not None else column_mass(seq, k, 2) - 1
        series = recurrence_statistic(tower.base, x, horizon, o["beta"])
        ok = ok and sep.holds
        out.append({"k": k, "separation": sep.to_json(), "recurrence": series.to_json()})
        rows.extend([[k] + row for row in series.csv_rows()])
    return Outcome({"levels": out}, ok, ["k"] + RecurrenceSeries.csv_header, rows)


HANDLERS = {name: globals()[f"_cmd_{name}"] for name in COMMANDS}


def run_command(cfg: RunConfig, threads: int = 1) -> Tuple[int, dict, Outcome]:
    outcome = HANDLERS[cfg.command](cfg, threads)
    report = {
        "command": cfg.command,
        "config": cfg.echo,
        "tool_version": __version__,
        "ok": outcome.ok,
        "results": outcome.results,
    }
    return (0 if outcome.ok else 2), report, outcome


def emit_report(report: dict, outcome: Outcome, fmt: str) -> str:
    """Render deterministically; the same report always gives the same bytes."""
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(outcome.csv_header)
    writer.writerows(outcome.csv_rows)
    return buf.getvalue()


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="keanelab", description=__doc__.split("\n\n")[0])
    parser.add_argument("--config", required=True, help="path to a JSON run config")
    parser.add_argument("--out", help="directory for <command>.<format>; stdout if omitted")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--threads", type=int, default=1)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = parse_config(fh.read())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return 1
    try:
        code, report, outcome = run_command(cfg, max(1, args.threads))
    except (PreconditionError, SequenceError, InductionBudgetError, SegmentSplitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = emit_report(report, outcome, args.format)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, f"{cfg.command}.{args.format}")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
