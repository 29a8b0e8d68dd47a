"""Command-line entry point: ``freeword <subcommand> ...``.

Reports are JSON objects tagged ``"schema": "freeword/1"``. Exit codes: 0 on
success, 1 on domain errors (error JSON on stderr), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import functools
import json
import math
import sys
import warnings
from pathlib import Path
from typing import Sequence

from . import __version__
from .automata import WeightedDfa, check_symbol_table, compile_text, structure_flags, validate
from .construction import DEFAULT_DIAMOND_WEIGHT, augment, plain, split
from .errors import FreewordError
from .modelfree import SequenceSet, detect
from .oracle import rate_estimate, weighted_counts
from .sampling import SamplerConfig, sample_prefix_closed_typical, sample_words, split_on_separators
from .spectral import DEFAULT_TOL, dfa_level_chain, parry_chain, project_to_dfa
from .typicality import evaluate_suite, is_typical, typical_cluster

SCHEMA = "freeword/1"
VARIANTS = ("diamond", "aperiodic", "plain", "auto")


class UsageError(Exception):
    pass


# -- argument types -----------------------------------------------------


def _bounded(kind, lo=None, hi=None, lo_open=False):
    def parse(text: str):
        try:
            value = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a valid {kind.__name__}: {text!r}") from None
        if isinstance(value, float) and not math.isfinite(value):
            raise argparse.ArgumentTypeError("value must be finite")
        if lo is not None and (value <= lo if lo_open else value < lo):
            raise argparse.ArgumentTypeError(f"value must be {'>' if lo_open else '>='} {lo}")
        if hi is not None and value > hi:
            raise argparse.ArgumentTypeError(f"value must be <= {hi}")
        return value

    return parse


seed_type = _bounded(int, 0, 2**64 - 1)
positive_int = _bounded(int, 1)
positive_float = _bounded(float, 0.0, lo_open=True)
finite_float = _bounded(float)


def _load_json_arg(text: str):
    """Inline JSON, or the path of a JSON file."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return json.loads(stripped)
    with open(text) as fh:
        return json.load(fh)


# -- output -------------------------------------------------------------


def _round(value, digits: int):
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return float(f"{value:.{digits}g}") if digits else value
    if isinstance(value, dict):
        return {k: _round(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v, digits) for v in value]
    if hasattr(value, "item"):  # numpy scalar
        return _round(value.item(), digits)
    return value


def _emit(report: dict, args, stream=None) -> None:
    report = {"schema": SCHEMA, **report}
    text = json.dumps(_round(report, args.precision), indent=2) + "\n"
    target = getattr(args, "report", None) or getattr(args, "emit", None)
    if target:
        Path(target).write_text(text)
    (stream or sys.stdout).write(text)


# -- shared loading -----------------------------------------------------


def _load_dfa(args) -> WeightedDfa:
    weights = check_symbol_table(_load_json_arg(args.weights)) if args.weights else None
    if args.regex is not None:
        if weights is None:
            raise UsageError("--regex needs --weights to define the symbol table")
        return compile_text(args.regex, weights)
    if args.dfa is None:
        raise UsageError("one of --dfa or --regex is required")
    return WeightedDfa.load(args.dfa, weights)


def _chain(dfa: WeightedDfa, args, variant: str | None = None):
    aug = augment(dfa, variant or args.variant, args.diamond_weight)
    return parry_chain(split(aug), args.tol)


def _transition_probs(pdfa) -> list[dict]:
    return [{"from": p, "symbol": a, "to": q, "probability": pdfa.prob(p, a, q)} for p, a, q in pdfa.dfa.transition_list()]


# -- subcommands --------------------------------------------------------


def cmd_compile(args) -> dict:
    dfa = _load_dfa(args)
    return {"dfa": dfa.to_json()}


def cmd_analyze(args) -> dict:
    dfa = _load_dfa(args)
    sc, ap = structure_flags(dfa)
    chain = _chain(dfa, args)
    return {
        "states": len(dfa.states),
        "transitions": len(dfa.transitions),
        "violations": [str(v) for v in validate(dfa)],
        "strongly_connected": sc,
        "aperiodic": ap,
        "variant": chain.graph.aug.variant,
        "diamond_weight": chain.graph.aug.diamond_weight,
        "perron_split": chain.perron,
        "perron_dfa": math.exp(2 * chain.log_perron) if chain.graph.fully_split else None,
        "rate_per_edge": chain.rate_per_edge,
        "rate_per_symbol": chain.rate_per_symbol,
        "residual": chain.residual,
    }


def cmd_chain(args) -> dict:
    dfa = _load_dfa(args)
    chain = _chain(dfa, args)
    pdfa = project_to_dfa(chain)
    graph = chain.graph
    dfa_nodes = set(pdfa.dfa.states)
    pi = chain.stationary
    return {
        "variant": graph.aug.variant,
        "diamond_weight": graph.aug.diamond_weight,
        "perron": chain.perron,
        "log_perron": chain.log_perron,
        "rate_per_edge": chain.rate_per_edge,
        "rate_per_symbol": chain.rate_per_symbol,
        "probabilities": _transition_probs(pdfa),
        "stationary": {name: float(pi[i]) for i, name in enumerate(graph.nodes) if name in dfa_nodes},
        "stationary_split": {name: float(pi[i]) for i, name in enumerate(graph.nodes)},
    }


def cmd_graph(args) -> dict:
    dfa = _load_dfa(args)
    graph = split(augment(dfa, args.variant, args.diamond_weight))
    sc, ap = graph.structure()
    return {"variant": graph.aug.variant, "strongly_connected": sc, "aperiodic": ap, "graph": graph.to_json()}


def cmd_generate(args):
    dfa = _load_dfa(args)
    chain = _chain(dfa, args)
    pdfa = project_to_dfa(chain)
    cfg = SamplerConfig(seed=args.seed, min_length=args.min_length, max_length=args.max_length)
    raw = sample_words(pdfa, cfg, args.count)
    if args.raw:
        words = [list(w) for w in raw]
    else:
        words = [list(member) for w in raw for member in split_on_separators(w, dfa).words]
    if args.format == "json":
        return {"seed": args.seed, "variant": chain.graph.aug.variant, "raw": args.raw, "words": words}
    print(f"seed: {args.seed}", file=sys.stderr)
    sys.stdout.write("".join(" ".join(w) + "\n" for w in words))
    return None


def cmd_typical(args) -> dict:
    dfa = _load_dfa(args)
    chain = _chain(dfa, args, "aperiodic")
    if args.prefix_closed:
        cfg = SamplerConfig(seed=args.seed, min_length=args.length, epsilon=args.epsilon, max_attempts=args.max_attempts)
        word, walk, attempts = sample_prefix_closed_typical(chain, cfg)
        verdict = is_typical(walk, chain, args.epsilon)
        words = [list(word)]
    else:
        found = typical_cluster(chain, args.epsilon, args.length, args.seed, args.max_attempts)
        verdict, attempts = found.verdict, found.attempts
        words = [list(w) for w in found.cluster.words]
    return {
        "seed": args.seed,
        "epsilon": args.epsilon,
        "length": args.length,
        "attempts": attempts,
        "verdict": verdict.to_json(),
        "words": words,
    }


def _read_words(path) -> list[list[str]]:
    with open(path) as fh:
        return [line.split() for line in fh if line.strip()]


def cmd_suite_eval(args) -> dict:
    dfa = _load_dfa(args)
    variant = args.variant
    if variant == "diamond":
        variant = "auto"
    chain = _chain(dfa, args, variant)
    report = evaluate_suite(project_to_dfa(chain), _read_words(args.suite), args.epsilon, args.unit)
    return report.to_json()


def cmd_detect(args) -> dict:
    table = check_symbol_table(_load_json_arg(args.symbols))
    directory = Path(args.sets)
    if not directory.is_dir():
        raise UsageError(f"{directory} is not a directory")
    sets = [SequenceSet(p.stem, [tuple(w) for w in _read_words(p)]) for p in sorted(directory.iterdir()) if p.is_file()]
    report = detect(sets, table, args.epsilon, args.seed)
    return {"seed": args.seed, **report.to_json()}


def cmd_oracle_rate(args) -> dict:
    dfa = _load_dfa(args)
    est = rate_estimate(weighted_counts(dfa, args.n_max))
    out = {"n_max": args.n_max, "plain": est.plain, "smoothed": est.smoothed, "finite_language": est.finite_language}
    sc, _ = structure_flags(dfa)
    if sc:
        log_perron = dfa_level_chain(plain(dfa), args.tol).log_perron
        out["log_perron_dfa"] = log_perron
        out["residual_plain"] = est.plain - log_perron
        out["residual_smoothed"] = est.smoothed - log_perron
    return out


# -- parser -------------------------------------------------------------


def _add_model_args(p: argparse.ArgumentParser, variant: str | None = "diamond") -> None:
    src = p.add_argument_group("model")
    src.add_argument("--dfa", help="DFA JSON file")
    src.add_argument("--regex", help="regular expression over the --weights symbols")
    src.add_argument("--weights", help="symbol weights as inline JSON or a JSON file; overrides embedded weights")
    p.add_argument("--diamond-weight", type=finite_float, default=DEFAULT_DIAMOND_WEIGHT, help="weight of the <> edge")
    if variant is not None:
        p.add_argument("--variant", choices=VARIANTS, default=variant)
    p.add_argument("--tol", type=positive_float, default=DEFAULT_TOL, help=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freeword", description="Free-energy random words for weighted regular languages")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=_bounded(int, 0, 17), default=6, help="significant digits in reports (0 = full)")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser = functools.partial(sub.add_parser, parents=[common])

    p = sub.add_parser("compile", help="compile a regex or load a DFA and print the minimal DFA JSON")
    _add_model_args(p)
    p.add_argument("--emit", help="also write the report to this file")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("analyze", help="structure flags and rates")
    _add_model_args(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("chain", help="Gurevich chain: probabilities and stationary law")
    _add_model_args(p)
    p.add_argument("--emit", help="also write the report to this file")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("graph", help="split graph as an edge list")
    _add_model_args(p)
    p.add_argument("--emit", help="also write the report to this file")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("generate", help="random words from the Gurevich chain")
    _add_model_args(p)
    p.add_argument("--seed", type=seed_type, default=0)
    p.add_argument("-n", dest="count", type=positive_int, default=1, help="number of sampler runs")
    p.add_argument("--min-length", type=positive_int, default=1)
    p.add_argument("--max-length", type=positive_int)
    p.add_argument("--raw", action="store_true", help="keep separator symbols")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("typical", help="typical cluster by rejection sampling on the aperiodic graph")
    _add_model_args(p, None)
    p.add_argument("--seed", type=seed_type, default=0)
    p.add_argument("--epsilon", type=positive_float, default=0.1)
    p.add_argument("--length", type=positive_int, default=1000, help="walk length (edges), or word length with --prefix-closed")
    p.add_argument("--max-attempts", type=positive_int, default=1000)
    p.add_argument("--prefix-closed", action="store_true", help="long typical word of a prefix-closed language")
    p.set_defaults(func=cmd_typical)

    p = sub.add_parser("suite-eval", help="typicality verdicts and branch coverage of a test suite")
    _add_model_args(p, "auto")
    p.add_argument("--suite", required=True, help="one word per line, symbols separated by whitespace")
    p.add_argument("--epsilon", type=positive_float, default=0.1)
    p.add_argument("--unit", choices=("edge", "symbol"), default="symbol")
    p.add_argument("--report", help="also write the report to this file")
    p.set_defaults(func=cmd_suite_eval)

    p = sub.add_parser("detect", help="model-free typicality of sequence sets")
    p.add_argument("--symbols", required=True, help="symbol weights as inline JSON or a JSON file")
    p.add_argument("--sets", required=True, help="directory with one file per set, one word per line")
    p.add_argument("--epsilon", type=positive_float, default=0.1)
    p.add_argument("--seed", type=seed_type, default=0)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("oracle-rate", help="rate from weighted word counts")
    _add_model_args(p)
    p.add_argument("--n-max", type=_bounded(int, 100, 10_000), default=2000)
    p.set_defaults(func=cmd_oracle_rate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report = args.func(args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        if report is not None:
            if caught:
                report["warnings"] = [str(w.message) for w in caught]
            _emit(report, args)
        return 0
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"freeword: error: {exc}", file=sys.stderr)
        return 2
    except FreewordError as exc:
        _emit_error(exc.to_dict())
        return 1
    except (OSError, ValueError, KeyError) as exc:
        _emit_error({"error": type(exc).__name__, "message": str(exc)})
        return 1


def _emit_error(payload: dict) -> None:
    sys.stderr.write(json.dumps({"schema": SCHEMA, **payload}) + "\n")


if __name__ == "__main__":
    sys.exit(main())
