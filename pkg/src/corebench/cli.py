"""Command-line front end.

Four subcommands: ``run`` (one mechanism on one profile), ``benchmark``
(CoreRev/VcgRev/MV for a profile or explicit environment), ``verify``
(property suites over seeded random profiles), and ``experiment``
(Monte-Carlo sweeps writing CSV plus a JSON sidecar).

Exit codes: 0 ok, 1 violations or broken invariants, 2 malformed input,
3 enumeration cap exceeded.  The cap can be set with --cap or the
COREBENCH_CAP environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .benchmarks import benchmark_report, text_image_environment, vcg_outcome
from .environments import GenericEnvironment
from .errors import CapExceededError, InputError, InvariantError, MonotonicityError
from .experiments import (
    LowerBoundConfig,
    efficient_subset_hardness,
    estimate_mechanism_revenue,
    ratio_sweep,
    write_sidecar,
    write_sweep_csv,
)
from .mechanisms import RandomizedOutcome, outcome_to_dict, realization_to_dict, realize_lottery
from .profiles import TextImageProfile
from .verification import get_mechanism, verification_suite

__all__ = ["main"]


def _resolve_cap(args) -> int | None:
    if getattr(args, "cap", None) is not None:
        return args.cap
    raw = os.environ.get("COREBENCH_CAP")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"COREBENCH_CAP must be an integer, got {raw!r}") from None


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _load_profile(path: str) -> TextImageProfile:
    profile = TextImageProfile.from_dict(_load_json(path))
    if profile.n_agents == 0:
        raise InputError("profile fields 'text' and 'image' are both empty")
    return profile


def _emit(data: dict, out: str | None) -> None:
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _positive_seed(value: int) -> int:
    if value < 0:
        raise InputError(f"--seed must be >= 0, got {value}")
    return value


def _parse_k_list(raw: str) -> list[int]:
    try:
        ks = [int(part) for part in raw.split(",") if part.strip() != ""]
    except ValueError:
        raise InputError(f"--k expects comma-separated integers, got {raw!r}") from None
    if not ks or any(k < 1 for k in ks):
        raise InputError(f"--k values must be positive, got {raw!r}")
    return ks


# -- subcommands ------------------------------------------------------------------


def cmd_run(args) -> int:
    cap = _resolve_cap(args)
    _positive_seed(args.seed)
    profile = _load_profile(args.profile)
    if args.mechanism == "vcg":
        outcome = vcg_outcome(text_image_environment(profile, cap=cap), cap=cap)
    else:
        outcome = get_mechanism(args.mechanism).run(profile)
    data = outcome_to_dict(outcome, profile)
    if args.realize < 0:
        raise InputError(f"--realize must be >= 0, got {args.realize}")
    if args.realize:
        if not isinstance(outcome, RandomizedOutcome):
            raise InputError("--realize only applies to the randomized mechanism")
        data["realizations"] = [
            realization_to_dict(realize_lottery(outcome, args.seed + i))
            for i in range(args.realize)
        ]
    _emit(data, args.out)
    return 0


def cmd_benchmark(args) -> int:
    cap = _resolve_cap(args)
    if args.profile:
        source: TextImageProfile | GenericEnvironment = _load_profile(args.profile)
    else:
        source = GenericEnvironment.from_dict(_load_json(args.env))
    report = benchmark_report(source, use_oracle=args.oracle, cap=cap)
    _emit(report.to_dict(), args.out)
    return 0


def cmd_verify(args) -> int:
    _positive_seed(args.seed)
    if args.trials < 1:
        raise InputError(f"--trials must be >= 1, got {args.trials}")
    report = verification_suite(get_mechanism(args.mechanism), args.trials, args.seed)
    _emit(report, args.out)
    return 0 if report["clean"] else 1


def cmd_experiment(args) -> int:
    _positive_seed(args.seed)
    if args.samples < 1:
        raise InputError(f"--samples must be >= 1, got {args.samples}")
    ks = _parse_k_list(args.k)
    sidecar: dict = {
        "command": args.experiment,
        "k": ks,
        "samples": args.samples,
        "seed": args.seed,
        "format": args.format,
    }
    if args.experiment == "lower-bound":
        mechanism = get_mechanism(args.mechanism or "rand")
        sidecar["mechanism"] = mechanism.name
        rows = [
            estimate_mechanism_revenue(mechanism, LowerBoundConfig(k, args.samples, args.seed))
            for k in ks
        ]
    elif args.experiment == "ratio-sweep":
        mechanism = get_mechanism(args.mechanism or "rand")
        sidecar["mechanism"] = mechanism.name
        rows = ratio_sweep(mechanism, ks, samples=args.samples, seed=args.seed)
    else:  # subset-hardness
        hardness = [efficient_subset_hardness(k, args.samples, args.seed) for k in ks]
        sidecar["imageEfficientFrequency"] = {
            str(h.k): h.image_efficient_frequency for h in hardness
        }
        sidecar["imageValue"] = {str(h.k): h.image_value for h in hardness}
        rows = [h.as_sweep_result() for h in hardness]
    out = Path(args.out)
    if args.format == "json":
        payload = [dict(zip(("k", "samples", "mean_corerev", "se_corerev", "mean_revenue",
                             "se_revenue", "worst_ratio"),
                            (r.k, r.samples, r.mean_core_revenue, r.se_core_revenue,
                             r.mean_revenue, r.se_revenue, r.worst_ratio)))
                   for r in rows]
        out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        write_sweep_csv(out, rows)
    write_sidecar(out.with_suffix(".json") if out.suffix != ".json" else
                  out.with_name(out.stem + ".sidecar.json"), sidecar)
    return 0


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corebench",
        description="Core-competitive text/image auctions: mechanisms, benchmarks, "
        "verification, experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one mechanism on one profile")
    run.add_argument("--mechanism", required=True, choices=["det", "rand", "vcg"])
    run.add_argument("--profile", required=True, help="profile JSON path")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--realize", type=int, default=0, metavar="N",
                     help="also draw N seeded lottery realizations")
    run.add_argument("--out", default=None)
    run.add_argument("--format", choices=["json"], default="json")
    run.add_argument("--cap", type=int, default=None)
    run.set_defaults(func=cmd_run)

    bench = sub.add_parser("benchmark", help="CoreRev / VcgRev / MV for an instance")
    source = bench.add_mutually_exclusive_group(required=True)
    source.add_argument("--profile", default=None, help="profile JSON path")
    source.add_argument("--env", default=None, help="explicit environment JSON path")
    bench.add_argument("--oracle", action="store_true",
                       help="force the LP oracle for a profile's core revenue")
    bench.add_argument("--out", default=None)
    bench.add_argument("--format", choices=["json"], default="json")
    bench.add_argument("--cap", type=int, default=None)
    bench.set_defaults(func=cmd_benchmark)

    verify = sub.add_parser("verify", help="property suites over random profiles")
    verify.add_argument("--mechanism", required=True)
    verify.add_argument("--trials", type=int, default=200)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--out", default=None)
    verify.add_argument("--format", choices=["json"], default="json")
    verify.set_defaults(func=cmd_verify)

    exp = sub.add_parser("experiment", help="Monte-Carlo sweeps (CSV + JSON sidecar)")
    exp.add_argument("experiment", choices=["lower-bound", "ratio-sweep", "subset-hardness"])
    exp.add_argument("--k", required=True, help="comma-separated list, e.g. 16,256,4096")
    exp.add_argument("--samples", type=int, default=10000)
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--mechanism", default=None,
                     help="mechanism for lower-bound / ratio-sweep (default rand)")
    exp.add_argument("--out", required=True, help="CSV output path")
    exp.add_argument("--format", choices=["csv", "json"], default="csv")
    exp.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"corebench: input error: {exc}", file=sys.stderr)
        return 2
    except CapExceededError as exc:
        print(f"corebench: {exc}", file=sys.stderr)
        return 3
    except (InvariantError, MonotonicityError) as exc:
        print(f"corebench: invariant violated: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
