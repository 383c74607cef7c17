"""Command-line driver: end-to-end simulations, (t, alpha) sweeps, baseline
comparison tables, region reports, and invariant verification runs.

Exit codes: 0 success, 1 verification failure, 2 bad configuration,
3 bad demands, 4 indivisible file size, 5 decode failure.
"""

from __future__ import annotations

import argparse
import csv
import os
import random
import sys
from fractions import Fraction
from typing import Sequence

from . import analytics, baselines, single, verify
from .analytics import RatePoint
from .errors import (
    ConstraintError,
    DecodeError,
    DegenerateError,
    DemandError,
    DivisibilityError,
    HullError,
    RangeError,
    ReconstructError,
    ScopeError,
    SingularError,
)
from .hierarchy import make_library, run_simulation
from .model import HierConfig, min_file_bytes, validate_config

CSV_HEADER = [
    "scheme", "K1", "K2", "N", "t", "alpha",
    "M1", "M2", "Mbar", "R1", "R2", "Rbar", "Rsum", "Tconc", "Tseq",
]
SEED_ENV = "HIERCACHE_SEED"


def _fmt(value, rational: bool, places: int = 6) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, str):
        return value
    if rational:
        return str(Fraction(value))
    return "%.*f" % (places, float(value))


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError("%r is not a rational (use p/q)" % text) from exc


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _fraction_list(text: str) -> list[Fraction]:
    return [_fraction(x) for x in text.split(",") if x.strip()]


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        return int(env)
    return random.SystemRandom().getrandbits(64)


def _random_surjective(k: int, n: int, seed: int) -> tuple[int, ...]:
    """Uniform surjective demand vector by rejection sampling."""
    rng = random.Random(seed & 0xFFFFFFFFFFFFFFFF)
    while True:
        vec = tuple(rng.randint(1, n) for _ in range(k))
        if len(set(vec)) == n:
            return vec


def _rate_point_row(point: RatePoint, n: int, t="", alpha="", rational: bool = False) -> list[str]:
    return [
        point.scheme_tag,
        str(point.k1),
        str(point.k2),
        str(n),
        str(t),
        _fmt(alpha, rational) if alpha != "" else "",
        _fmt(point.m1, rational),
        _fmt(point.m2, rational),
        _fmt(point.m_bar, rational),
        _fmt(point.r1, rational),
        _fmt(point.r2, rational),
        _fmt(point.r_bar, rational),
        _fmt(point.r_sum, rational),
        _fmt(point.t_concurrent, rational),
        _fmt(point.t_sequential, rational),
    ]


def cmd_simulate(args) -> int:
    seed = _resolve_seed(args)
    if args.single_mirror:
        return _simulate_single(args, seed)
    cfg = validate_config(args.k1, args.k2, args.n, args.t, args.alpha)
    file_bytes = args.file_bytes or min_file_bytes(cfg)
    if args.demands:
        demands = tuple(args.demands)
    else:
        demands = _random_surjective(cfg.k, cfg.n_files, seed)
    library = make_library(cfg, file_bytes, seed)
    sim = run_simulation(cfg, library, demands)
    print("config : K1=%d K2=%d N=%d t=%d alpha=%s" % (cfg.k1, cfg.k2, cfg.n_files, cfg.t, cfg.alpha))
    print("seed   : %d   file-bytes: %d   demands: %s" % (seed, file_bytes, ",".join(map(str, demands))))
    m1, m2 = analytics.memory_point(cfg)
    rat = args.rational
    print("memory : M1=%s M2=%s Mbar=%s" % (_fmt(m1, rat), _fmt(m2, rat), _fmt(analytics.global_memory(cfg), rat)))
    print(
        "rates  : R1 measured=%s closed=%s   R2-worst measured=%s closed=%s"
        % (
            _fmt(sim.rates.r1, rat),
            _fmt(analytics.rate_r1(cfg), rat),
            _fmt(sim.rates.r2_worst, rat),
            _fmt(analytics.rate_r2_worst(cfg), rat),
        )
    )
    for m, r2 in enumerate(sim.rates.r2_per_mirror, start=1):
        closed = analytics.rate_r2(cfg, sim.profile.mirror_counts[m - 1])
        print("mirror %d: R2 measured=%s closed=%s" % (m, _fmt(r2, rat), _fmt(closed, rat)))
    failures = 0
    for user, payload in enumerate(sim.decoded, start=1):
        ok = payload == library[sim.profile.demand_of(user) - 1]
        failures += not ok
        print("user %d: DECODE %s" % (user, "OK" if ok else "FAIL"))
    return 5 if failures else 0


def _simulate_single(args, seed: int) -> int:
    if args.k1 != 1:
        raise ConstraintError("--single-mirror requires --k1 1")
    if args.m1 is None:
        raise ConstraintError("--single-mirror requires --m1")
    cfg = single.single_config(args.k2, args.n, args.alpha, args.m1)
    file_bytes = args.file_bytes or single.min_file_bytes_single(cfg)
    demands = tuple(args.demands) if args.demands else _random_surjective(cfg.k, cfg.n_files, seed)
    library = make_library(cfg.as_hier(), file_bytes, seed)
    placement, log, decoded, profile = single.run_single_simulation(cfg, library, demands)
    rat = args.rational
    r1_closed, r2_closed = single.closed_form_rates(cfg)
    print("config : single mirror, K=%d N=%d alpha=%s M1=%s" % (cfg.k, cfg.n_files, cfg.alpha, cfg.m1))
    print("seed   : %d   file-bytes: %d   demands: %s" % (seed, file_bytes, ",".join(map(str, demands))))
    print("memory : M1=%s M2=%s" % (_fmt(cfg.m1, rat), _fmt(cfg.m2, rat)))
    print(
        "rates  : R1 measured=%s closed=%s   R2 measured=%s closed=%s"
        % (_fmt(log.r1, rat), _fmt(r1_closed, rat), _fmt(log.r2, rat), _fmt(r2_closed, rat))
    )
    failures = 0
    for user, payload in enumerate(decoded, start=1):
        ok = payload == library[profile.demand_of(user) - 1]
        failures += not ok
        print("user %d: DECODE %s" % (user, "OK" if ok else "FAIL"))
    return 5 if failures else 0


def _sweep_rows(args) -> list[list[str]]:
    rows = []
    schemes = args.schemes or ["hiercache"]
    for k1 in args.k1_list:
        for k2 in args.k2_list:
            for n in args.n_list:
                k = k1 * k2
                t_values = args.t_list or list(range(1, k + 1))
                for t in t_values:
                    if not 1 <= t <= k:
                        continue
                    for alpha in args.alpha_grid:
                        if n > k and alpha != 0:
                            continue
                        cfg = validate_config(k1, k2, n, t, alpha)
                        point = analytics.composite(cfg)
                        for scheme in schemes:
                            row_point = None
                            if scheme == "hiercache":
                                row_point = point
                            elif scheme == "kwc":
                                if alpha == 0:
                                    row_point = baselines.kwc_rates(k1, k2, n, t)
                            elif scheme == "knmd":
                                choice = baselines.knmd_optimal_tuple(k1, k2, n, point.m1, point.m2, args.beta_floor)
                                r1, r2 = baselines.knmd_rates(
                                    k1, k2, n, point.m1, point.m2, choice.alpha, choice.beta, args.beta_floor
                                )
                                row_point = RatePoint(point.m1, point.m2, r1, r2, k1, k2, "knmd")
                            elif scheme == "zwxwl":
                                row_point = baselines.zwxwl_point(k1, k2, n, point.m1, point.m2)
                            elif scheme == "zwxwll":
                                r1, r2, _ = baselines.zwxwll_best(k1, k2, n, point.m1, point.m2, args.beta_floor)
                                row_point = RatePoint(point.m1, point.m2, r1, r2, k1, k2, "zwxwll")
                            elif scheme == "wwcy":
                                r1, r2, _ = baselines.wwcy_best(k1, k2, n, point.m1, point.m2, args.beta_floor)
                                row_point = RatePoint(point.m1, point.m2, r1, r2, k1, k2, "wwcy")
                            else:
                                raise RangeError("unknown scheme %r" % scheme)
                            if row_point is not None:
                                rows.append(_rate_point_row(row_point, n, t, alpha, args.rational))
    return rows


def cmd_sweep(args) -> int:
    rows = _sweep_rows(args)
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(CSV_HEADER)
        writer.writerows(rows)
    finally:
        if args.out:
            out.close()
    if args.out:
        print("wrote %d rows to %s" % (len(rows), args.out))
    return 0


def solve_compare_point(k1: int, k2: int, n: int, target) -> HierConfig:
    """Smallest t whose alpha-line reaches the target global memory, with
    the exact alpha solving it."""
    target = Fraction(target)
    k = k1 * k2
    for t in range(1, k + 1):
        zero_end = analytics.global_memory(validate_config(k1, k2, n, t, 0))
        one_end = analytics.global_memory(validate_config(k1, k2, n, t, 1))
        lo, hi = min(zero_end, one_end), max(zero_end, one_end)
        if lo <= target <= hi and zero_end != one_end:
            alpha = (zero_end - target) / (zero_end - one_end)
            return validate_config(k1, k2, n, t, alpha)
    raise RangeError("global memory %s unreachable for K1=%d K2=%d N=%d" % (target, k1, k2, n))


def compare_rows(k1: int, k2: int, n: int, target, beta_floor) -> tuple[list[RatePoint], HierConfig]:
    """The comparison table at one global-memory point: published schemes
    evaluated at the layered scheme's memory split, the joint-caching scheme
    on its own grid via memory sharing."""
    cfg = solve_compare_point(k1, k2, n, target)
    mine = analytics.composite(cfg)
    m1, m2 = mine.m1, mine.m2
    choice = baselines.knmd_optimal_tuple(k1, k2, n, m1, m2, beta_floor)
    knmd_r1, knmd_r2 = baselines.knmd_rates(k1, k2, n, m1, m2, choice.alpha, choice.beta, beta_floor)
    zw_grid = [
        baselines.zwxwl_point(k1, k2, n, 0, 0),
        baselines.zwxwl_point(k1, k2, n, Fraction(n, k1), 0),
        baselines.zwxwl_point(k1, k2, n, 0, Fraction(n, k2)),
    ]
    zw = baselines.zwxwl_envelope(zw_grid, mine.m_bar)
    zwll_r1, zwll_r2, _ = baselines.zwxwll_best(k1, k2, n, m1, m2, beta_floor)
    wwcy_r1, wwcy_r2, _ = baselines.wwcy_best(k1, k2, n, m1, m2, beta_floor)
    return [
        RatePoint(m1, m2, knmd_r1, knmd_r2, k1, k2, "knmd"),
        zw,
        RatePoint(m1, m2, zwll_r1, zwll_r2, k1, k2, "zwxwll"),
        RatePoint(m1, m2, wwcy_r1, wwcy_r2, k1, k2, "wwcy"),
        mine,
    ], cfg


def cmd_compare(args) -> int:
    rows, cfg = compare_rows(args.k1, args.k2, args.n, args.mbar, args.beta_floor)
    rat = args.rational
    print(
        "comparison at Mbar=%s (K1=%d K2=%d N=%d; layered point t=%d alpha=%s)"
        % (_fmt(Fraction(args.mbar), rat, 4), args.k1, args.k2, args.n, cfg.t, cfg.alpha)
    )
    header = ["scheme", "M1", "M2", "Mbar", "R1", "R2", "Rbar"]
    table = [header] + [
        [
            p.scheme_tag,
            _fmt(p.m1, rat, 4),
            _fmt(p.m2, rat, 4),
            _fmt(p.m_bar, rat, 4),
            _fmt(p.r1, rat, 4),
            _fmt(p.r2, rat, 4),
            _fmt(p.r_bar, rat, 4),
        ]
        for p in rows
    ]
    widths = [max(len(r[c]) for r in table) for c in range(len(header))]
    for r in table:
        print("  ".join(cell.ljust(w) for cell, w in zip(r, widths)))
    return 0


def cmd_region(args) -> int:
    cfg = validate_config(args.k1, args.k2, args.n, args.k2, args.alpha)
    report = analytics.region_classify(cfg)
    rat = args.rational
    print("A        : %s" % _fmt(report.region_a, rat, 4))
    print("B        : %s" % _fmt(report.region_b, rat, 4))
    print("threshold: %s" % _fmt(report.alpha_threshold, rat, 4))
    print("alpha    : %s" % _fmt(cfg.alpha, rat, 4))
    print("region   : Region %s" % report.region)
    print("many-mirrors-implies-II : %s" % report.many_mirrors_implies_ii)
    print("balanced-avoids-III     : %s" % report.balanced_avoids_iii)
    return 0


def cmd_verify(args) -> int:
    seed = _resolve_seed(args)
    configs = verify.default_config_grid(args.max_users)
    summary = verify.verify_configs(configs, seed=seed)
    lemma = verify.lemma_subset_growth()
    regions = verify.region_predicates()
    signs = verify.threshold_signs()
    print("configs checked   : %d instances (K <= %d), seed %d" % (summary.instances, args.max_users, seed))
    print("demand vectors    : %d" % summary.demand_vectors)
    print("user decodes      : %d" % summary.decodes)
    print("subset-growth lemma checks: %s" % ("pass" if not lemma else "FAIL"))
    print("region predicate checks   : %s" % ("pass" if not regions and not signs else "FAIL"))
    failures = summary.failures + lemma + regions + signs
    if failures:
        for f in failures[:20]:
            print("FAIL:", f)
        print("%d total failures" % len(failures))
        return 1
    print("all invariants hold")
    return 0


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise RangeError("config line %r is not key=value" % line)
            key, _, val = line.partition("=")
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _apply_config_defaults(parser: argparse.ArgumentParser, values: dict[str, str]) -> None:
    converters = {
        "k1": int, "k2": int, "n": int, "t": int, "seed": int, "file_bytes": int,
        "max_users": int, "alpha": _fraction, "m1": _fraction, "mbar": _fraction,
        "beta_floor": _fraction, "demands": _int_list, "t_list": _int_list,
        "alpha_grid": _fraction_list, "k1_list": _int_list, "k2_list": _int_list,
        "n_list": _int_list, "schemes": lambda s: s.split(","), "out": str,
        "single_mirror": lambda s: s.lower() in ("1", "true", "yes"),
        "rational": lambda s: s.lower() in ("1", "true", "yes"),
    }
    defaults = {}
    for key, raw in values.items():
        if key not in converters:
            raise RangeError("unknown config key %r" % key)
        defaults[key] = converters[key](raw)
    parser.set_defaults(**defaults)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hiercache", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, seed=True):
        p.add_argument("--config", help="flat key=value file; flags override it")
        p.add_argument("--rational", action="store_true", help="print exact p/q instead of decimals")
        if seed:
            p.add_argument("--seed", type=int, help="RNG seed (fallback: $%s)" % SEED_ENV)

    sim = sub.add_parser("simulate", help="end-to-end placement/delivery/decode run")
    common(sim)
    sim.add_argument("--k1", type=int, default=1)
    sim.add_argument("--k2", type=int, default=1)
    sim.add_argument("--n", type=int, required=False, default=1)
    sim.add_argument("--t", type=int, default=1)
    sim.add_argument("--alpha", type=_fraction, default=Fraction(0))
    sim.add_argument("--m1", type=_fraction, help="mirror memory (single-mirror mode)")
    sim.add_argument("--file-bytes", dest="file_bytes", type=int)
    sim.add_argument("--demands", type=_int_list, help="comma-separated demand vector")
    sim.add_argument("--single-mirror", dest="single_mirror", action="store_true")
    sim.set_defaults(func=cmd_simulate)

    sweep = sub.add_parser("sweep", help="CSV of rate points over a (t, alpha) grid")
    common(sweep, seed=False)
    sweep.add_argument("--k1", dest="k1_list", type=_int_list, default=[1])
    sweep.add_argument("--k2", dest="k2_list", type=_int_list, default=[1])
    sweep.add_argument("--n", dest="n_list", type=_int_list, default=[1])
    sweep.add_argument("--t", dest="t_list", type=_int_list, help="default: all t in [1, K]")
    sweep.add_argument(
        "--alpha", dest="alpha_grid", type=_fraction_list,
        default=[Fraction(i, 10) for i in range(11)],
    )
    sweep.add_argument("--schemes", type=lambda s: s.split(","), help="hiercache,kwc,knmd,zwxwl,zwxwll,wwcy")
    sweep.add_argument("--beta-floor", dest="beta_floor", type=_fraction, default=baselines.DEFAULT_BETA_FLOOR)
    sweep.add_argument("--out", help="output CSV path (default: stdout)")
    sweep.set_defaults(func=cmd_sweep)

    cmp_ = sub.add_parser("compare", help="baseline comparison table at one global memory")
    common(cmp_, seed=False)
    cmp_.add_argument("--k1", type=int, required=True)
    cmp_.add_argument("--k2", type=int, required=True)
    cmp_.add_argument("--n", type=int, required=True)
    cmp_.add_argument("--mbar", type=_fraction, required=True)
    cmp_.add_argument("--beta-floor", dest="beta_floor", type=_fraction, default=baselines.DEFAULT_BETA_FLOOR)
    cmp_.set_defaults(func=cmd_compare)

    reg = sub.add_parser("region", help="alpha-region report at t = K2")
    common(reg, seed=False)
    reg.add_argument("--k1", type=int, required=True)
    reg.add_argument("--k2", type=int, required=True)
    reg.add_argument("--n", type=int, required=True)
    reg.add_argument("--alpha", type=_fraction, required=True)
    reg.set_defaults(func=cmd_region)

    ver = sub.add_parser("verify", help="run the executable invariant suite")
    common(ver)
    ver.add_argument("--max-users", dest="max_users", type=int, default=4)
    ver.set_defaults(func=cmd_verify)

    parser.subcommand_parsers = [sim, sweep, cmp_, reg, ver]  # type: ignore[attr-defined]
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if "--config" in argv:
        pre = argv.index("--config")
        if pre + 1 < len(argv):
            try:
                values = _load_config_file(argv[pre + 1])
                for sub in parser.subcommand_parsers:  # type: ignore[attr-defined]
                    _apply_config_defaults(sub, values)
            except OSError as exc:
                print("error: cannot read config file: %s" % exc, file=sys.stderr)
                return 2
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ConstraintError, RangeError, ScopeError, HullError, DegenerateError, SingularError) as exc:
        print("configuration error: %s" % exc, file=sys.stderr)
        return 2
    except DemandError as exc:
        print("demand error: %s" % exc, file=sys.stderr)
        return 3
    except DivisibilityError as exc:
        print("divisibility error: %s" % exc, file=sys.stderr)
        return 4
    except (DecodeError, ReconstructError) as exc:
        print("decode error: %s" % exc, file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
