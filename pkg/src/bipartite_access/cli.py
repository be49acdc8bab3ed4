"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 a replication hit its cap or a
self-test failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from .algorithm import (
    PathLimitError,
    classify_regime,
    enumerate_admissible,
    multiplicity_of_dstar,
    run_algorithm,
)
from .experiments import (
    ExperimentError,
    export,
    graph_prediction,
    iid_min_selftest,
    law_normalization_selftest,
    run_experiment,
    traces_laws,
)
from .graph import GraphError, load_graph
from .params import ModelParams, ParamsError, load_params, parse_real
from .predictor import PredictionError, mean_transition
from .simulator import SimulationError, simulate_many

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CAP = 2

COMMANDS = ("analyze", "paths", "predict", "simulate", "verify", "selftest")


class InputError(Exception):
    pass


def bundled(name: str) -> Path:
    return Path(str(resources.files("bipartite_access") / "data" / name))


def _resolve(path: str) -> Path:
    """Use the path as given; fall back to a bundled example of the same name."""
    p = Path(path)
    if p.exists():
        return p
    b = bundled(p.name)
    if b.exists():
        return b
    raise InputError(f"file not found: {path}")


def _graph(args):
    if not args.graph:
        raise InputError("--graph is required")
    return load_graph(_resolve(args.graph), permissive=args.permissive)


def _params(args, required: bool = True) -> ModelParams | None:
    if not args.params:
        if required:
            raise InputError("--params is required for this command")
        return None
    p = load_params(_resolve(args.params))
    if args.beta is not None:
        p = p.with_(beta=args.beta)
    return p


def _beta(args):
    p = _params(args, required=False)
    if p is not None:
        return p.beta
    if args.beta is None:
        raise InputError("--beta or --params is required")
    beta = parse_real(args.beta)
    if not beta > 0:
        raise InputError("requires beta > 0")
    return beta


def _frac(x) -> str:
    return f"{x.numerator}/{x.denominator}"


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------


def cmd_analyze(args) -> int:
    g = _graph(args)
    beta = _beta(args)
    trace = run_algorithm(g, args.seed)
    regime = classify_regime(trace.d_star, beta)
    if args.format == "json":
        _emit(args, _dump({"d_star": trace.d_star, "regime": regime.tag.value, "trace": trace.to_json()}))
    else:
        _emit(args, f"d*={trace.d_star}, regime={regime.tag.value}, "
                    f"trace={','.join(trace.order)} (p={_frac(trace.probability)})\n")
    return EXIT_OK


def cmd_paths(args) -> int:
    g = _graph(args)
    traces = enumerate_admissible(g)
    if args.format == "json":
        docs = [t.to_json() | {"multiplicity": multiplicity_of_dstar(t)} for t in traces]
        _emit(args, _dump(docs))
        return EXIT_OK
    lines = []
    for t in traces:
        lines.append(
            f"{','.join(t.order)}  dbar={','.join(map(str, t.dbar))}  n={','.join(map(str, t.n))}  "
            f"d*={t.d_star}  multiplicity={multiplicity_of_dstar(t)}  p={_frac(t.probability)}"
        )
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_predict(args) -> int:
    g = _graph(args)
    p = _params(args)
    traces = enumerate_admissible(g)
    doc = {
        "pooled": graph_prediction(g, p, traces).to_json(),
        "traces": [{"trace": t.to_json(), "prediction": mean_transition(t, p).to_json()} for t in traces],
        "params": p.to_dict(),
    }
    _emit(args, _dump(doc))
    return EXIT_OK


def cmd_simulate(args) -> int:
    g = _graph(args)
    p = _params(args)
    outs = simulate_many(g, p, args.reps, args.seed, args.cap_events, args.cap_time, args.threads)
    _emit(args, "".join(o.to_jsonl() + "\n" for o in outs))
    n_capped = sum(o.capped for o in outs)
    if n_capped:
        print(f"{n_capped} of {len(outs)} replications hit a cap", file=sys.stderr)
        return EXIT_CAP
    return EXIT_OK


def cmd_verify(args) -> int:
    g = _graph(args)
    p = _params(args)
    try:
        report = run_experiment(g, p, args.reps, args.seed, args.cap_events, args.cap_time, args.threads)
    except ExperimentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    if args.format == "csv":
        tables = export(report, "csv")
        if args.out:
            for name, text in tables.items():
                Path(f"{args.out}.{name}.csv").write_text(text, encoding="utf-8")
        else:
            sys.stdout.write("\n".join(f"# table={name}\n{text}" for name, text in tables.items()))
    else:
        _emit(args, export(report, "json"))
    if report.n_capped:
        print(f"{report.n_capped} of {report.n_reps} replications hit a cap", file=sys.stderr)
        return EXIT_CAP
    return EXIT_OK


def cmd_selftest(args) -> int:
    p = _params(args, required=False) or load_params(bundled("crit.json"))
    inv = 1 / p.beta
    d = int(inv) + 1 if inv == int(inv) else 2
    results = iid_min_selftest(p, d, seed=args.seed)
    laws = []
    for gname, pname in (("k31.txt", "sub.json"), ("fig4.txt", "fig4_sub.json"), ("fig8.txt", "sub.json")):
        laws += traces_laws(enumerate_admissible(load_graph(bundled(gname))), load_params(bundled(pname)))
    results += law_normalization_selftest(list(dict.fromkeys(laws)))
    if args.format == "json":
        _emit(args, _dump([r.to_json() for r in results]))
    else:
        _emit(args, "".join(
            f"{'PASS' if r.passed else 'FAIL'} {r.name} value={r.value:.6g} target={r.target:.6g} tol={r.tolerance:g}\n"
            for r in results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_CAP


HANDLERS = {
    "analyze": cmd_analyze,
    "paths": cmd_paths,
    "predict": cmd_predict,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bipartite-access", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--graph", help="edge-list or JSON graph (bundled example names also work)")
    ap.add_argument("--params", help="parameter JSON file")
    ap.add_argument("--beta", help="override beta; accepts rationals such as 1/2")
    ap.add_argument("--reps", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--cap-events", type=int, default=None)
    ap.add_argument("--cap-time", type=float, default=None)
    ap.add_argument("--out", help="output file (CSV: prefix for one file per table)")
    ap.add_argument("--format", choices=("text", "json", "csv"), default=None)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--permissive", action="store_true", help="accept U-nodes without neighbors")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = "text" if args.command in ("analyze", "paths", "selftest") else "json"
    if args.reps < 1:
        print("error: --reps must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return HANDLERS[args.command](args)
    except (InputError, GraphError, ParamsError, PredictionError, SimulationError, PathLimitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
