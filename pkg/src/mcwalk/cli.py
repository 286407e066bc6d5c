"""Command-line entry point.

Exit codes: 0 success, 1 verification or I/O failure, 2 usage error
(bad flags, unknown config keys, invalid amplitudes). Every randomized
command takes ``--seed`` (default 0); output is a pure function of the
arguments.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from . import analysis, qss, recipes
from .statevec import NORM_TOL, GeneralizedBellLabel, decode_index, sample_shots, basis_label

DEFAULT_SEED = 0
FORMATS = ("json", "csv", "table")
RECIPE_NAMES = ("bell-2line", "bell-2complete", "qudit-pair", "ghz-2line", "ghz-2complete", "ghz-qudit")
QUBIT_RECIPES = ("bell-2line", "bell-2complete", "ghz-2line", "ghz-2complete")


class UsageError(Exception):
    pass


def parse_amplitude(text: str) -> complex:
    """``re+imj`` (Python complex syntax) or ``prob@phase`` (phase in radians)."""
    text = text.strip()
    try:
        if "@" in text:
            prob, phase = (float(x) for x in text.split("@", 1))
            if prob < 0:
                raise ValueError
            return math.sqrt(prob) * cmath.exp(1j * phase)
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse amplitude {text!r}") from None


def parse_amplitude_list(text: str) -> list[complex]:
    return [parse_amplitude(part) for part in text.split(",")]


# -- output -------------------------------------------------------------------


def _flatten(row: dict, prefix: str = "") -> dict:
    out = {}
    for key, value in row.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten(value, name + "."))
        elif isinstance(value, (list, tuple)):
            out[name] = json.dumps(value)
        else:
            out[name] = value
    return out


def emit(results: Any, fmt: str, lines: bool = False) -> bytes:
    """Serialize ``results``.

    json is canonical (sorted keys, repr-precision floats); with ``lines``
    a list is written one JSON object per line. csv and table expect a
    list of row dicts (or one dict) and flatten nested fields.
    """
    if fmt == "json":
        if lines and isinstance(results, list):
            text = "".join(json.dumps(r, sort_keys=True) + "\n" for r in results)
        else:
            text = json.dumps(results, sort_keys=True, indent=2) + "\n"
        return text.encode()
    rows = results if isinstance(results, list) else [results]
    rows = [_flatten(r) for r in rows]
    columns: list[str] = []
    for r in rows:
        columns += [c for c in r if c not in columns]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue().encode()
    if fmt == "table":
        cells = [[_cell(r.get(c, "")) for c in columns] for r in rows]
        widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
        out = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
        out.append("  ".join("-" * w for w in widths))
        out += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
        return ("\n".join(out) + "\n").encode()
    raise UsageError(f"unknown format {fmt!r}")


def _cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


# -- recipes ------------------------------------------------------------------


def _check_pair(a: complex, b: complex) -> None:
    norm = abs(a) ** 2 + abs(b) ** 2
    if abs(norm - 1) > NORM_TOL:
        raise UsageError(f"|a|^2 + |b|^2 = {norm!r}, expected 1")


def _check_list(values: Sequence[complex], d: int, name: str) -> None:
    if len(values) != d:
        raise UsageError(f"{name} needs {d} amplitudes, got {len(values)}")
    norm = sum(abs(v) ** 2 for v in values)
    if abs(norm - 1) > NORM_TOL:
        raise UsageError(f"{name} is not normalized (sum |.|^2 = {norm!r})")


def _label(args) -> GeneralizedBellLabel:
    if args.d < 2:
        raise UsageError(f"--d must be >= 2, got {args.d}")
    return GeneralizedBellLabel.wrap(args.d, args.k, args.l)


def recipe_setup(args) -> recipes.RecipeSetup:
    name = args.recipe
    if name in QUBIT_RECIPES:
        _check_pair(args.a, args.b)
    if name == "bell-2line":
        return recipes.bell_2line_setup(args.a, args.b)
    if name == "bell-2complete":
        return recipes.bell_2complete_setup(args.a, args.b, args.variant)
    if name == "ghz-2line":
        return recipes.ghz_2line_setup(args.a, args.b)
    if name == "ghz-2complete":
        return recipes.ghz_2complete_setup(args.a, args.b)
    if name == "qudit-pair":
        first, second = _qudit_inputs(args)
        return recipes.qudit_pair_setup(args.d, first, second)
    if name == "ghz-qudit":
        return recipes.ghz_qudit_setup(args.d, _label(args))
    raise UsageError(f"unknown recipe {name!r}")


def _qudit_inputs(args):
    if args.a_list is None and args.b_list is None:
        label = _label(args)
        return label, label
    if args.a_list is None or args.b_list is None:
        raise UsageError("--a-list and --b-list must be given together")
    _check_list(args.a_list, args.d, "--a-list")
    _check_list(args.b_list, args.d, "--b-list")
    return args.a_list, args.b_list


def run_recipe(args) -> list[recipes.RecipeOutcome]:
    name = args.recipe
    if name in QUBIT_RECIPES:
        _check_pair(args.a, args.b)
    if name == "bell-2line":
        return recipes.bell_2line(args.a, args.b)
    if name == "bell-2complete":
        return recipes.bell_2complete(args.a, args.b, args.variant)
    if name == "ghz-2line":
        return recipes.ghz_2line(args.a, args.b)
    if name == "ghz-2complete":
        return recipes.ghz_2complete(args.a, args.b)
    if name == "qudit-pair":
        first, second = _qudit_inputs(args)
        return recipes.qudit_pair_dcomplete(args.d, first, second)
    if name == "ghz-qudit":
        return recipes.ghz_qudit_dcomplete(args.d, _label(args))
    raise UsageError(f"unknown recipe {name!r}")


def cmd_recipe(args):
    outcomes = run_recipe(args)
    payload = [o.to_dict() for o in outcomes]
    rows = [
        {
            "outcome": basis_label(o.outcome, [args.d] * len(o.outcome)),
            "prob": o.prob,
            "fidelity": o.fidelity_to_target,
            "amplitude_error": o.amplitude_error,
            "target_form": o.target_form,
        }
        for o in outcomes
    ]
    return payload, rows, recipes.all_match(outcomes)


def cmd_sample(args):
    setup = recipe_setup(args)
    final = setup.final_state()
    counts = sample_shots(final, args.shots, args.seed)
    probs = final.probabilities()
    expected = {
        basis_label(decode_index(int(i), final.dims), final.dims): float(probs[i])
        for i in np.flatnonzero(probs > 1e-12)
    }
    payload = {"recipe": args.recipe, "shots": args.shots, "seed": args.seed, "counts": counts, "expected": expected}
    rows = [
        {"basis": key, "count": counts.get(key, 0), "expected_prob": expected.get(key, 0.0)}
        for key in sorted(set(counts) | set(expected))
    ]
    ok = sum(counts.values()) == args.shots and set(counts) <= set(expected)
    return payload, rows, ok


def cmd_tomo(args):
    if args.recipe not in QUBIT_RECIPES:
        raise UsageError(f"tomography supports qubit recipes only: {QUBIT_RECIPES}")
    if not 0 <= args.noise <= 1:
        raise UsageError(f"--noise must lie in [0, 1], got {args.noise}")
    outcomes = run_recipe(args)
    shots = None if args.shots == 0 else args.shots
    results = analysis.tomography_by_outcome(outcomes, shots, args.seed, args.method, args.noise)
    payload, rows = [], []
    for key, (res, fid) in results.items():
        entry = {"outcome": list(key), "fidelity": fid, **res.to_dict()}
        payload.append(entry)
        rows.append({"outcome": "".join(map(str, key)), "fidelity": fid, "method": res.method, "is_psd": res.is_psd})
    threshold = 0.99 if args.threshold is None else args.threshold
    return payload, rows, all(f >= threshold for _, f in results.values())


def cmd_circle_search(args):
    threshold = 0.99 if args.threshold is None else args.threshold
    report = recipes.circle_search(args.case, args.samples, args.seed, threshold)
    payload = report.to_dict()
    return payload, [payload], not report.witness_found


def _qss_config(args) -> qss.QssConfig:
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
    for key in ("d", "k", "l", "q", "parties", "seed"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    data.setdefault("seed", DEFAULT_SEED)
    try:
        return qss.QssConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _adversary(args) -> qss.Adversary:
    target = args.target_link
    if target is not None and target.lstrip("-").isdigit():
        target = int(target)
    return qss.Adversary(args.adversary, 0 if target is None else target)


def cmd_qss(args):
    config = _qss_config(args)
    adversary = _adversary(args)
    try:
        adversary.link(config.parties)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.qss_command == "run":
        secret = 0 if args.secret is None else args.secret
        if not 0 <= secret < config.d:
            raise UsageError(f"--secret must lie in [0, {config.d})")
        transcripts = [qss.run_protocol_n(config, secret, adversary)]
    else:
        if args.runs < 1:
            raise UsageError("--runs must be >= 1")
        if args.secret is not None and not 0 <= args.secret < config.d:
            raise UsageError(f"--secret must lie in [0, {config.d})")
        transcripts = qss.run_batch(config, args.runs, args.secret, adversary)
    payload = [t.to_dict() for t in transcripts]
    if args.qss_command == "run":
        payload = payload[0]
    rows = [
        {
            "seed": t.seed,
            "phase": t.phase,
            "aborted": t.aborted,
            "rounds": t.rounds,
            "true_secret": t.true_secret,
            "decoded_secret": "" if t.decoded_secret is None else t.decoded_secret,
        }
        for t in transcripts
    ]
    ok = all(t.correct for t in transcripts if not t.aborted)
    return payload, rows, ok


# -- parser -------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, seed: bool = True) -> None:
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--verify", action="store_true", help="exit 1 unless every check passes")
    if seed:
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)


def _recipe_params(p: argparse.ArgumentParser) -> None:
    s = 2**-0.5
    p.add_argument("--a", type=parse_amplitude, default=complex(s), help="re+imj or prob@phase")
    p.add_argument("--b", type=parse_amplitude, default=complex(s), help="re+imj or prob@phase")
    p.add_argument("--variant", choices=recipes.BELL_VARIANTS, default="IHX")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--l", type=int, default=0)
    p.add_argument("--a-list", type=parse_amplitude_list, help="comma-separated Schmidt amplitudes")
    p.add_argument("--b-list", type=parse_amplitude_list, help="comma-separated Schmidt amplitudes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcwalk", description="Multi-coin quantum walk simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("recipe", help="run one entanglement-generation recipe")
    p.add_argument("recipe", choices=RECIPE_NAMES)
    _recipe_params(p)
    _common(p, seed=False)
    p.set_defaults(handler=cmd_recipe)

    p = sub.add_parser("sample", help="shot histogram of a recipe's final walk state")
    p.add_argument("--recipe", choices=RECIPE_NAMES, default="bell-2complete")
    p.add_argument("--shots", type=int, default=8192)
    _recipe_params(p)
    _common(p)
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser("tomo", help="simulated Pauli tomography of recipe residuals")
    p.add_argument("--recipe", choices=QUBIT_RECIPES, default="bell-2complete")
    p.add_argument("--shots", type=int, default=8192, help="shots per setting; 0 = exact expectations")
    p.add_argument("--method", choices=analysis.TOMOGRAPHY_METHODS, default="linear_inversion")
    p.add_argument("--noise", type=float, default=0.0, help="depolarizing probability")
    p.add_argument("--threshold", type=float, help="fidelity gate for --verify (default 0.99)")
    _recipe_params(p)
    _common(p)
    p.set_defaults(handler=cmd_tomo)

    p = sub.add_parser("circle-search", help="random search for entangling 2-circle coins")
    p.add_argument("--case", choices=recipes.CIRCLE_CASES, default="two_qubit_3coins")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--threshold", type=float, help="fraction of maximal entanglement (default 0.99)")
    _common(p)
    p.set_defaults(handler=cmd_circle_search)

    p = sub.add_parser("qss", help="quantum secret sharing simulation")
    qsub = p.add_subparsers(dest="qss_command", required=True)
    for name in ("run", "batch"):
        q = qsub.add_parser(name)
        q.add_argument("--config", help="JSON file with d, k, l, q, parties, seed")
        q.add_argument("--d", type=int)
        q.add_argument("--k", type=int)
        q.add_argument("--l", type=int)
        q.add_argument("--q", type=float)
        q.add_argument("--parties", type=int)
        q.add_argument("--seed", type=int)
        q.add_argument("--secret", type=int)
        q.add_argument("--adversary", choices=qss.STRATEGIES, default="none")
        q.add_argument("--target-link", help="link index or alice-bob / alice-charlie")
        if name == "batch":
            q.add_argument("--runs", type=int, default=100)
        _common(q, seed=False)
        q.set_defaults(handler=cmd_qss)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload, rows, ok = args.handler(args)
        lines = getattr(args, "qss_command", None) == "batch"
        data = emit(payload if args.format == "json" else rows, args.format, lines=lines)
    except UsageError as exc:
        print(f"mcwalk: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"mcwalk: error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.out:
            with open(args.out, "wb") as fh:
                fh.write(data)
        else:
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
    except OSError as exc:
        print(f"mcwalk: error: {exc}", file=sys.stderr)
        return 1
    if args.verify and not ok:
        print("mcwalk: verification failed", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
