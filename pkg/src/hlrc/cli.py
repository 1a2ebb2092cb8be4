"""Command-line front end.

Exit status: 0 when every audit passes, 1 when a claim is violated (bound,
point count, census, recovery), 2 for usage and configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import __version__
from .code import (
    bound_branch,
    check_rho,
    distance_bound_value,
    generator_matrix,
    param_report,
    validate_spec,
)
from .config import PRESET_NAMES, build_code_spec, build_field, preset, validate_config
from .errors import AuditFailure, BudgetExceeded, ConfigInvalid, HLRCError, RankDeficient, RecoveryMismatch
from .recovery import (
    FAILED,
    RECOVERED_LOWER,
    ErasurePattern,
    build_hierarchy,
    failing_middle,
    random_pattern,
    simulate,
    worst_lower,
    worst_middle,
)
from .surface import evaluation_set, max_eta
from .verify import (
    DEFAULT_BUDGET,
    AuditRecord,
    check_as_census,
    check_bound,
    check_point_counts,
    min_distance_exhaustive,
    low_weight_search,
    normalization_count,
    projective_message_count,
    sharpness_witness,
)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset, tuple)):
        return list(obj)
    return str(obj)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


@dataclass
class ActionResult:
    name: str
    payload: dict
    table: str
    csv: str | None = None
    passed: bool = True
    files: dict = dc_field(default_factory=dict)  # extra artifacts: filename -> text


class Job:
    """Lazily built objects shared by the actions of one config."""

    def __init__(self, cfg: dict):
        self.cfg = cfg
        self._code = self._G = self._hmap = None

    @property
    def code(self):
        if self._code is None:
            self._code = validate_spec(build_code_spec(self.cfg))
        return self._code

    @property
    def G(self):
        if self._G is None:
            self._G = generator_matrix(self.code)
        return self._G

    @property
    def hmap(self):
        if self._hmap is None:
            self._hmap = build_hierarchy(self.code.evalset)
        return self._hmap


# -- actions --------------------------------------------------------------------

def action_params(job: Job, opts: dict) -> ActionResult:
    rep = param_report(job.code)
    d = rep.to_dict()
    flat = {k: v for k, v in d.items() if not isinstance(v, (dict, list))}
    return ActionResult("params", d, rep.table(), _csv(list(flat), [list(flat.values())]))


def action_build(job: Job, opts: dict) -> ActionResult:
    G = job.G
    d = job.code.field.digits
    ev_rows = [[i, " ".join(map(str, d(x))), " ".join(map(str, d(y))), " ".join(map(str, d(z)))]
               for i, (x, y, z) in enumerate(zip(G.evalset.xs.tolist(), G.evalset.ys.tolist(),
                                                 G.evalset.zs.tolist()))]
    payload = {"n": G.n, "k": G.k, "rank": G.rank}
    files = {
        "generator.json": _dump(G.to_json_dict()),
        "generator.csv": G.to_csv(),
        "evaluation_set.json": _dump(G.evalset.rows()),
        "evaluation_set.csv": _csv(["index", "x", "y", "z"], ev_rows),
    }
    return ActionResult("build", payload, f"generator matrix {G.k} x {G.n}, rank {G.rank}", files=files)


def action_verify_distance(job: Job, opts: dict) -> ActionResult:
    code, G = job.code, job.G
    mode = opts.get("mode", "auto")
    budget = opts.get("budget", DEFAULT_BUDGET)
    seed = opts.get("seed", 0)
    trials = opts.get("trials", 10000)
    if mode == "auto":
        mode = "exhaustive" if projective_message_count(G.field.q, G.k) <= budget else "sampled"
    if mode == "exhaustive":
        result = min_distance_exhaustive(G, budget)
    else:
        result = low_weight_search(G, code, trials, seed)
    records = []
    files = {}
    try:
        records.append(check_bound(result, code))
    except AuditFailure as exc:
        files["witness.json"] = _dump(exc.record.to_dict())
        records.append(exc.record)
    if opts.get("sharpness"):
        records.append(sharpness_witness(G, code))
    refs = {name: {"value": v, "respected": result.measured_min_weight >= v}
            for name, v in sorted(opts.get("reference_bounds", {}).items())}
    payload = {"distance": result.to_dict(), "audits": [r.to_dict() for r in records],
               "reference_bounds": refs}
    lines = [f"{result.mode} minimum weight {result.measured_min_weight} "
             f"({result.evaluated} words, {result.method})"]
    lines += [f"{r.verdict}  {r.claim}: expected {r.expected}, measured {r.measured}" for r in records]
    lines += [f"reference {name} = {v['value']}: {'respected' if v['respected'] else 'NOT respected'}"
              for name, v in refs.items()]
    rows = [[r.claim, r.source, r.expected, r.measured, r.verdict] for r in records]
    return ActionResult("verify-distance", payload, "\n".join(lines),
                        _csv(["claim", "source", "expected", "measured", "verdict"], rows),
                        all(r.passed for r in records), files)


def action_verify_census(job: Job, opts: dict) -> ActionResult:
    kind = opts["census"]
    files = {}
    try:
        if kind == "as-census":
            rec = check_as_census(opts["p"])
        else:
            q = opts["q"]
            results = check_point_counts(q)
            counts = {r.counted for r in results if r.label.endswith("projective")}
            derived, formula = normalization_count(q, counts.pop())
            rec = AuditRecord(
                f"Kummer fiber point counts at q={q}", "closed-form point counts",
                "all fibers match", f"{len(results)} counts match",
                "PASS" if derived == formula else "FAIL",
                {"counts": {r.label: r.counted for r in results},
                 "normalization_derived": derived, "normalization_formula": formula},
            )
    except AuditFailure as exc:
        rec = exc.record
        files["witness.json"] = _dump(rec.to_dict())
    line = f"{rec.verdict}  {rec.claim}: expected {rec.expected}, measured {rec.measured}"
    return ActionResult("verify-census", rec.to_dict(), line,
                        _csv(["claim", "source", "expected", "measured", "verdict"],
                             [[rec.claim, rec.source, rec.expected, rec.measured, rec.verdict]]),
                        rec.passed, files)


def _expected_ok(kind: str, report) -> bool:
    if kind == "worst-lower":
        return report.count(RECOVERED_LOWER) == len(report)
    if kind == "worst-middle":
        return report.fully_recovered
    if kind == "fail-middle":
        return report.count(FAILED) == len(report)
    return True


def run_simulation(job: Job, kind: str, trials: int, seed: int, erasures: int | None = None,
                   lower_groups: int | None = None, indices=None) -> dict:
    """Random codewords against one pattern kind; any wrong value raises RecoveryMismatch."""
    code, G, hmap = job.code, job.G, job.hmap
    rng = np.random.default_rng(seed)
    words = G.encode_many(rng.integers(0, G.field.q, size=(trials, G.k)))
    summary = {"pattern": kind, "trials": trials, "seed": seed, "as_expected": 0,
               "erased": 0, "recovered_lower": 0, "recovered_middle": 0, "failed": 0,
               "max_cost_lower": 0, "max_cost_middle": 0}
    for word in words:
        if kind == "worst-lower":
            groups = None
            if lower_groups is not None and lower_groups < len(hmap.lower_groups):
                groups = rng.choice(len(hmap.lower_groups), size=lower_groups, replace=False).tolist()
            pattern = worst_lower(hmap, code, rng, groups)
        elif kind == "worst-middle":
            pattern = worst_middle(hmap, code, rng)
        elif kind == "fail-middle":
            pattern = failing_middle(hmap, code, rng)
        elif kind == "indices":
            pattern = ErasurePattern.of(indices, G.n)
        else:
            pattern = random_pattern(G.n, erasures or code.spec.rho2, rng)
        rep = simulate(word.tolist(), pattern, hmap, code)
        summary["as_expected"] += _expected_ok(kind, rep)
        summary["erased"] += len(rep)
        for e in rep.entries:
            key = {"RecoveredLower": "recovered_lower", "RecoveredMiddle": "recovered_middle"}.get(e.outcome, "failed")
            summary[key] += 1
            if e.outcome != FAILED:
                cost_key = "max_cost_lower" if e.outcome == RECOVERED_LOWER else "max_cost_middle"
                summary[cost_key] = max(summary[cost_key], e.cost)
    return summary


def action_simulate(job: Job, opts: dict) -> ActionResult:
    trials = opts.get("trials", 100)
    seed = opts.get("seed", 0)
    kinds = ["indices"] if "indices" in opts else opts.get("patterns", ["worst-lower", "worst-middle"])
    rows = []
    for t, kind in enumerate(kinds):
        rows.append(run_simulation(job, kind, trials, seed + t, opts.get("erasures"),
                                   opts.get("lower_groups"), opts.get("indices")))
    code = job.code
    r1, r2, _ = code.rho
    payload = {"runs": rows, "mismatches": 0,
               "cost_lower": code.deg - r2 + 1, "cost_middle": (code.eta - r1 + 1) * (code.deg - r2 + 1)}
    checked = [r for r in rows if r["pattern"] in ("worst-lower", "worst-middle", "fail-middle")]
    passed = all(r["as_expected"] == r["trials"] for r in checked)
    header = list(rows[0]) if rows else []
    table = "\n".join(
        f"{r['pattern']:>13}: {r['as_expected']}/{r['trials']} as expected, "
        f"lower {r['recovered_lower']}, middle {r['recovered_middle']}, failed {r['failed']}"
        for r in rows)
    return ActionResult("simulate", payload, table, _csv(header, [list(r.values()) for r in rows]), passed)


ACTIONS = {
    "params": action_params,
    "build": action_build,
    "simulate": action_simulate,
    "verify-distance": action_verify_distance,
    "verify-census": action_verify_census,
}


# -- sweep ----------------------------------------------------------------------

SWEEP_HEADER = ["rho1", "rho2", "rho3", "valid", "n", "k", "d_bound", "rate",
                "rel_distance_bound", "branch", "violation"]


def sweep(cfg: dict, rho1s=None, rho2s=None, rho3s=None) -> str:
    """One CSV row per tuple; invalid tuples carry the violated condition.

    Omitted ranges default to ``2..eta``, ``2..deg`` and ``1..|Gamma|``.
    """
    spec = build_code_spec({**cfg, "code": {**cfg.get("code", {}), "rho1": 0, "rho2": 0, "rho3": 0}})
    surface = spec.surface
    eta = max_eta(surface) if spec.eta is None else spec.eta
    ev = evaluation_set(surface, eta)
    kummer = surface.kind == "kummer"
    deg, s, n_gamma, n = surface.cover_degree, surface.s, len(ev.gammas), ev.n
    rho1s = range(2, eta + 1) if rho1s is None else rho1s
    rho2s = range(2, deg + 1) if rho2s is None else rho2s
    rho3s = range(1, n_gamma + 1) if rho3s is None else rho3s
    rows = []
    for r1 in rho1s:
        for r2 in rho2s:
            for r3 in rho3s:
                try:
                    check_rho(kummer, eta, deg, s, n_gamma, r1, r2, r3, spec.waive_condition2)
                except HLRCError as exc:
                    rows.append([r1, r2, r3, False, n, "", "", "", "", "", str(exc)])
                    continue
                k = (eta - r1 + 1) * (deg - r2 + 1) * (n_gamma - r3 + 1)
                d = distance_bound_value(r1, r2, r3, deg, s)
                rows.append([r1, r2, r3, True, n, k, d, f"{k / n:.6f}", f"{d / n:.6f}",
                             bound_branch(r1, r2, deg, s), ""])
    return _csv(SWEEP_HEADER, rows)


def parse_range(text: str) -> list[int]:
    """``"a:b"`` (inclusive), ``"a,b,c"`` or a single integer; empty string gives an empty range."""
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        a, b = text.split(":", 1)
        return list(range(int(a), int(b) + 1))
    return [int(t) for t in text.split(",")]


# -- driver ---------------------------------------------------------------------

def _artifact_files(result: ActionResult, index: int, formats) -> dict:
    stem = f"{index:02d}-{result.name}"
    files = {}
    if "json" in formats:
        files[f"{stem}.json"] = _dump(result.payload)
    if "csv" in formats and result.csv is not None:
        files[f"{stem}.csv"] = result.csv
    if "table" in formats:
        files[f"{stem}.txt"] = result.table + "\n"
    for name, text in result.files.items():
        files[f"{stem}-{name}"] = text
    return files


def run(cfg: dict, out_dir: str | None = None, formats=None, only=None, stream=None) -> int:
    """Execute the config's actions in order; returns the exit status."""
    stream = stream or sys.stdout
    cfg = validate_config(cfg)
    formats = formats or cfg.get("output", {}).get("formats", ["table"])
    out_dir = out_dir or cfg.get("output", {}).get("dir")
    job = Job(cfg)
    status = EXIT_OK
    artifacts: dict[str, str] = {}
    results = []
    for i, act in enumerate(cfg["actions"]):
        if only is not None and act["action"] not in only:
            continue
        opts = {k: v for k, v in act.items() if k != "action"}
        try:
            res = ACTIONS[act["action"]](job, opts)
        except (RankDeficient, RecoveryMismatch) as exc:
            res = ActionResult(act["action"], {"error": str(exc)}, f"FAIL  {exc}", passed=False)
        results.append(res)
        if not res.passed:
            status = EXIT_VIOLATION
        artifacts.update(_artifact_files(res, i, formats))
        if "json" in formats and len(formats) == 1:
            continue
        if "csv" in formats and len(formats) == 1 and res.csv is not None:
            stream.write(res.csv)
        else:
            stream.write(f"== {res.name} ==\n{res.table}\n")
    if "json" in formats and len(formats) == 1:
        stream.write(_dump({r.name + f"#{i}": r.payload for i, r in enumerate(results)}))
    if out_dir:
        write_artifacts(Path(out_dir), artifacts, cfg, status)
    return status


def manifest(cfg: dict, artifacts: dict, status: int) -> dict:
    F = build_field(cfg)
    seeds = sorted({a["seed"] for a in cfg["actions"] if "seed" in a})
    return {
        "tool": "hlrc", "version": __version__, "config": cfg,
        "field": F.to_dict(), "seeds": seeds, "exit_status": status,
        "artifacts": {name: hashlib.sha256(text.encode()).hexdigest()
                      for name, text in sorted(artifacts.items())},
    }


def write_artifacts(out: Path, artifacts: dict, cfg: dict, status: int) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name, text in artifacts.items():
        (out / name).write_text(text)
    (out / "manifest.json").write_text(_dump(manifest(cfg, artifacts, status)))


def _load(args) -> dict:
    if args.config and args.preset:
        raise ConfigInvalid("use either --config or --preset, not both")
    if args.preset:
        return preset(args.preset)
    if not args.config:
        raise ConfigInvalid("a --config PATH or --preset NAME is required")
    try:
        return json.loads(Path(args.config).read_text())
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config is not valid JSON: {exc}") from None


def _apply_overrides(cfg: dict, args, default_action: str | None = None) -> dict:
    cfg = json.loads(json.dumps(cfg))
    if default_action and not any(a["action"].startswith(default_action) for a in cfg["actions"]):
        cfg["actions"].append({"action": "verify-distance" if default_action == "verify" else default_action})
    for act in cfg["actions"]:
        for key in ("seed", "trials", "budget"):
            value = getattr(args, key, None)
            if value is not None and act["action"] in ("simulate", "verify-distance"):
                act[key] = value
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hlrc", description="Hierarchical locally recoverable codes on fibered surfaces.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, sampling=False):
        p.add_argument("--config", metavar="PATH", help="JSON job config")
        p.add_argument("--preset", metavar="NAME", choices=PRESET_NAMES, help="bundled config")
        p.add_argument("--out", metavar="DIR", help="write artifacts and a manifest here")
        p.add_argument("--format", choices=["json", "csv", "table"], help="output format")
        if sampling:
            p.add_argument("--seed", type=int)
            p.add_argument("--trials", type=int)
            p.add_argument("--budget", type=int)

    common(sub.add_parser("params", help="parameter table of the configured code"))
    common(sub.add_parser("build", help="generator matrix and evaluation set"))
    common(sub.add_parser("simulate", help="erasure-recovery simulation"), sampling=True)
    common(sub.add_parser("verify", help="distance and census audits"), sampling=True)
    common(sub.add_parser("run", help="all actions of the config in order"), sampling=True)
    sw = sub.add_parser("sweep", help="parameter table over rho ranges (CSV)")
    common(sw)
    sw.add_argument("--rho1", default=None, help="range a:b or list a,b,c (default: all)")
    sw.add_argument("--rho2", default=None)
    sw.add_argument("--rho3", default=None)
    pr = sub.add_parser("presets", help="list bundled configs or print one")
    pr.add_argument("name", nargs="?")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "presets":
            if args.name:
                sys.stdout.write(_dump(preset(args.name)))
            else:
                sys.stdout.write("\n".join(PRESET_NAMES) + "\n")
            return EXIT_OK
        cfg = _load(args)
        formats = [args.format] if args.format else None
        if args.command == "sweep":
            cfg = validate_config(cfg)
            if "code" not in cfg:
                raise ConfigInvalid("sweep needs a code section (eta and waiver are taken from it)")
            ranges = [None if r is None else parse_range(r) for r in (args.rho1, args.rho2, args.rho3)]
            text = sweep(cfg, *ranges)
            sys.stdout.write(text)
            if args.out:
                write_artifacts(Path(args.out), {"sweep.csv": text}, cfg, EXIT_OK)
            return EXIT_OK
        only = {
            "params": {"params"}, "build": {"build"}, "simulate": {"simulate"},
            "verify": {"verify-distance", "verify-census"}, "run": None,
        }[args.command]
        default = {"params": "params", "build": "build", "simulate": "simulate", "verify": "verify"}.get(args.command)
        cfg = _apply_overrides(cfg, args, default)
        return run(cfg, args.out, formats, only)
    except (ConfigInvalid, BudgetExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AuditFailure as exc:
        print(f"claim violated: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except HLRCError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
