"""Command-line entry point.

Exit codes: 0 success, 1 check or bound failure, 2 resource budget exceeded,
3 input error.
"""
import argparse
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import logging
import math
import sys

import numpy as np

from . import checks, report
from .definetti import verify_bound
from .errors import InvalidInputError, ResourceError, TruncationError
from .profiles import ProfileSpec, load_profile, profile_to_dict, two_peak_profile
from .quadrature import DEFAULT_TARGET_TAIL, profile_adapted_grid
from .weight_basis import SuperpositionProfile, from_profile

EXIT_OK, EXIT_FAIL, EXIT_BUDGET, EXIT_INPUT = 0, 1, 2, 3
DEFAULT_SEED = 20070301

log = logging.getLogger("cpfinetti")


@dataclass(frozen=True)
class RunConfig:
    command: str
    profile_path: str = None
    n: int = None
    k: int = None
    w_max: int = None
    grid_step: float = None
    target_tail: float = DEFAULT_TARGET_TAIL
    tolerance: float = 1e-6
    out: str = None
    fmt: str = "json"
    workers: int = 1
    seed: int = DEFAULT_SEED
    n_list: tuple = ()
    k_list: tuple = ()
    options: dict = field(default_factory=dict)

    def validate(self):
        if self.n is not None and self.k is not None and not (1 <= self.k < self.n):
            if not (self.command == "identity-check" and self.k == 0 and self.n >= 1):
                raise InvalidInputError(f"need 1 <= k < n, got n={self.n} k={self.k}")
        if self.grid_step is not None and self.grid_step <= 0:
            raise InvalidInputError("grid step must be positive")
        if self.tolerance <= 0 or not (0 < self.target_tail < 1):
            raise InvalidInputError("tolerance must be positive and target tail in (0, 1)")
        if self.workers < 1:
            raise InvalidInputError("workers must be >= 1")
        return self


def _complex(text):
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")


def _int_list(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")


def _emit(config, payload, rows=None, trailer=()):
    if config.fmt == "csv" and rows is not None:
        text = "\n".join(list(report.csv_lines(rows)) + list(trailer)) + "\n"
    else:
        text = report.dumps(payload) + "\n"
    if config.out:
        with open(config.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _spec(config) -> ProfileSpec:
    if not config.profile_path:
        raise InvalidInputError("--profile is required")
    spec = load_profile(config.profile_path)
    n = config.n if config.n is not None else spec.n
    k = config.k if config.k is not None else spec.k
    if not (1 <= k < n):
        raise InvalidInputError(f"need 1 <= k < n, got n={n} k={k}")
    w_max = config.w_max if config.w_max is not None else spec.w_max
    grid = dict(spec.grid)
    if config.grid_step is not None:
        grid["step"] = config.grid_step
    if config.target_tail != DEFAULT_TARGET_TAIL or "target_tail" not in grid:
        grid["target_tail"] = config.target_tail
    return replace(spec, n=n, k=k, w_max=w_max, grid=grid)


def run_bound(profile, n, k, w_max, grid_opts, workers=1):
    psi = from_profile(profile, n, w_max)
    grid = profile_adapted_grid(profile, n, k, grid_opts.get("target_tail", DEFAULT_TARGET_TAIL),
                                grid_opts.get("step"))
    return verify_bound(psi, k, grid, workers)


def cmd_identity_check(config):
    n = config.n if config.n is not None else 3
    k = config.k if config.k is not None else 1
    d = config.options.get("d", 12)
    alphas = config.options.get("alphas") or [0.5]
    step = config.grid_step if config.grid_step is not None else checks.IDENTITY_STEP
    grid = checks.identity_grid(n, k, d, alphas, step, config.target_tail)
    res = checks.identity_residuals(n, k, d, alphas, grid)
    worst = max([res["vacuum"]] + res["coherent"] + res["commutator"])
    passed = worst <= config.tolerance
    payload = {
        "command": "identity-check", "n": n, "k": k, "d": d,
        "alphas": [[a.real, a.imag] for a in map(complex, alphas)],
        "grid": {"nodes": len(grid), "step": grid.step, "radius": grid.meta.radius},
        "residuals": res, "tolerance": config.tolerance, "passed": passed,
    }
    _emit(config, payload)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_approx(config):
    spec = _spec(config)
    rep = run_bound(spec.profile, spec.n, spec.k, spec.w_max, spec.grid, config.workers)
    passed = rep.within_conservative_bound and not rep.quad_warning
    row = rep.as_dict()
    _emit(config, {"command": "approx", "report": row, "passed": passed}, rows=[row])
    if not passed:
        log.error("bound check failed: delta_full=%.6g conservative=%.6g quad_error=%.3g",
                  rep.delta_full, rep.bound_conservative, rep.quad_error)
    return EXIT_OK if passed else EXIT_FAIL


def slope_fit(ns, deltas):
    """Least-squares slope of ``log(delta)`` against ``log(n)``."""
    if len(ns) < 2:
        return float("nan")
    return float(np.polyfit(np.log(ns), np.log(deltas), 1)[0])


def sweep_rows(profile, n_list, k_list, w_max=None, grid_opts=None, workers=1):
    """One report per ``(n, k)`` with ``k < n``; failures are recorded per row."""
    grid_opts = grid_opts or {}
    pairs = [(n, k) for k in k_list for n in n_list if 1 <= k < n]

    def one(pair):
        n, k = pair
        try:
            return run_bound(profile, n, k, w_max, grid_opts).as_dict()
        except (InvalidInputError, TruncationError) as exc:
            return {"n": n, "k": k, "error": str(exc)}

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(one, pairs))
    else:
        rows = [one(p) for p in pairs]
    fits = {}
    for k in k_list:
        good = [r for r in rows if r["k"] == k and "error" not in r]
        fits[str(k)] = slope_fit([r["n"] for r in good], [r["delta_full"] for r in good])
    return rows, fits


def cmd_sweep(config):
    if not config.n_list or not config.k_list:
        raise InvalidInputError("sweep needs nonempty --n-list and --k-list")
    spec = _spec(replace(config, n=None, k=None))
    rows, fits = sweep_rows(spec.profile, config.n_list, config.k_list, spec.w_max,
                            spec.grid, config.workers)
    ok_rows = [r for r in rows if "error" not in r]
    failed = len(ok_rows) != len(rows) or not all(r["within_conservative_bound"] for r in ok_rows)
    payload = {"command": "sweep", "rows": rows, "slopes": fits, "passed": not failed}
    trailer = [f"# slope k={k} {report.fmt_float(s)}" for k, s in fits.items()]
    _emit(config, payload, rows=ok_rows, trailer=trailer)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_gaussian_profile(config):
    o = config.options
    profile = two_peak_profile(o["center1"], o["center2"], o["sigma"], o["samples"])
    n = config.n if config.n is not None else 16
    k = config.k if config.k is not None else 1
    spec = ProfileSpec(profile, n, k, config.w_max)
    from_profile(profile, n, config.w_max)
    text = report.dumps(profile_to_dict(spec)) + "\n"
    if config.out:
        with open(config.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_oracle_check(config):
    n = config.n if config.n is not None else 3
    k = config.k if config.k is not None else 1
    d = config.options.get("d", 12)
    w_max = config.w_max if config.w_max is not None else 8
    count = config.options.get("count", 10)
    rng = np.random.default_rng(config.seed)
    gaps = []
    for _ in range(count):
        profile = random_profile(rng)
        gaps.append(checks.oracle_equivalence(profile, n, k, d, w_max))
    passed = max(gaps) <= config.tolerance
    _emit(config, {"command": "oracle-check", "n": n, "k": k, "d": d, "w_max": w_max,
                   "seed": config.seed, "gaps": gaps, "passed": passed})
    return EXIT_OK if passed else EXIT_FAIL


def random_profile(rng, max_components=3, max_amplitude=1.0):
    """Up to ``max_components`` components with ``|gamma| <= max_amplitude``."""
    count = int(rng.integers(1, max_components + 1))
    comps = []
    for _ in range(count):
        r = max_amplitude * math.sqrt(rng.uniform())
        gamma = r * np.exp(2j * math.pi * rng.uniform())
        comps.append((complex(gamma), complex(rng.normal(), rng.normal())))
    return SuperpositionProfile(tuple(comps))


COMMANDS = {
    "identity-check": cmd_identity_check,
    "approx": cmd_approx,
    "sweep": cmd_sweep,
    "gaussian-profile": cmd_gaussian_profile,
    "oracle-check": cmd_oracle_check,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--profile", dest="profile_path")
    common.add_argument("--n", type=int)
    common.add_argument("--k", type=int)
    common.add_argument("--w-max", type=int)
    common.add_argument("--grid-step", type=float)
    common.add_argument("--target-tail", type=float, default=DEFAULT_TARGET_TAIL)
    common.add_argument("--tolerance", type=float)
    common.add_argument("--out")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="cpfinetti", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("identity-check", parents=[common],
                       help="resolution-of-identity and commutation residuals on a dense cube")
    p.add_argument("--d", type=int, default=12)
    p.add_argument("--alpha", type=_complex, action="append", dest="alphas")
    sub.add_parser("approx", parents=[common], help="one bound verification for a profile")
    p = sub.add_parser("sweep", parents=[common], help="bound verification over an (n, k) grid")
    p.add_argument("--n-list", type=_int_list, default=())
    p.add_argument("--k-list", type=_int_list, default=(1,))
    p = sub.add_parser("gaussian-profile", parents=[common],
                       help="write a sampled two-peak superposition profile")
    p.add_argument("--center1", type=_complex, required=True)
    p.add_argument("--center2", type=_complex, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--samples", type=int, default=9)
    p = sub.add_parser("oracle-check", parents=[common],
                       help="dense vs weight-basis reduced states on random profiles")
    p.add_argument("--d", type=int, default=12)
    p.add_argument("--count", type=int, default=10)
    return parser


def config_from_args(args) -> RunConfig:
    default_tol = {"identity-check": 1e-6, "oracle-check": 1e-10}.get(args.command, 1e-6)
    options = {key: getattr(args, key) for key in
               ("d", "alphas", "center1", "center2", "sigma", "samples", "count")
               if getattr(args, key, None) is not None}
    return RunConfig(
        command=args.command, profile_path=args.profile_path, n=args.n, k=args.k,
        w_max=args.w_max, grid_step=args.grid_step, target_tail=args.target_tail,
        tolerance=args.tolerance if args.tolerance is not None else default_tol,
        out=args.out, fmt=args.fmt, workers=args.workers, seed=args.seed,
        n_list=getattr(args, "n_list", ()), k_list=getattr(args, "k_list", ()),
        options=options,
    ).validate()


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = config_from_args(args)
        return COMMANDS[config.command](config)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InvalidInputError, TruncationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
