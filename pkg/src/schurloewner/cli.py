"""Command line entry point: ``schurloewner <group> <command> ...``.

Every command writes JSON to stdout (or ``--out``).  Exit status is 0 on
success, 2 when a check reports violations, 1 on errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .bounds import best_bound, parse_q
from .estimators import (
    estimate_commutator_ratio,
    estimate_schur_norm_hermitian,
    estimate_schur_norm_sampling,
    estimate_wstar_norm,
)
from .functions import parse_function
from .harness import CampaignConfig, demo_abs, demo_entropy_logit, demo_triangular, dumps_report, run_campaign
from .loewner import Spectrum, build_loewner, check_relations_R, psd_check
from .matrixcore import haar_unitary, matrix_from_json

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2


def _emit(obj: dict, out: str | None) -> None:
    text = dumps_report(obj)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_matrix(path: str):
    return matrix_from_json(json.loads(Path(path).read_text()))


def cmd_loewner_build(args) -> int:
    f = parse_function(args.function)
    L = build_loewner(f, Spectrum.load(args.spectrum), args.deg_tol)
    ok, lam = psd_check(L)
    out = L.to_json()
    out["psd"] = {"psd": ok, "min_eigenvalue": lam}
    out["relations_R"] = check_relations_R(L).to_json()
    _emit(out, args.out)
    return EXIT_OK


def cmd_bounds_compute(args) -> int:
    f = parse_function(args.function)
    report = best_bound(f, Spectrum.load(args.spectrum), [parse_q(q) for q in args.q], args.method)
    _emit(report.to_json(), args.out)
    return EXIT_OK


def _commutator_b(args):
    if args.matrix:
        return _load_matrix(args.matrix)
    s = Spectrum.load(args.spectrum)
    u = haar_unitary(len(s), np.random.default_rng([args.seed, 1]))
    return (u * s.array) @ u.conj().T


def cmd_estimate(args) -> int:
    kind = args.kind
    if kind == "wstar":
        res = estimate_wstar_norm(_load_matrix(args.matrix), args.samples, args.seed)
    elif kind == "commutator":
        res = estimate_commutator_ratio(parse_function(args.function), _commutator_b(args),
                                        parse_q(args.q), args.samples, args.seed)
    else:
        L = build_loewner(parse_function(args.function), Spectrum.load(args.spectrum))
        if kind == "hermitian":
            res = estimate_schur_norm_hermitian(L, args.restarts, args.max_iters, args.seed)
        else:
            res = estimate_schur_norm_sampling(L, parse_q(args.q), args.samples, args.seed)
    _emit(res.to_json(), args.out)
    return EXIT_OK


def cmd_verify_run(args) -> int:
    cfg = CampaignConfig.load(args.config) if args.config else CampaignConfig()
    report = run_campaign(cfg, args.threads)
    _emit(report, args.out)
    return EXIT_VIOLATION if report["summary"]["violations"] else EXIT_OK


def cmd_demo(args) -> int:
    if args.which == "abs":
        rep = demo_abs(args.n, args.r, args.seed, samples=args.samples)
        bad = rep["violations"] > 0 or not rep.get("band", {}).get("in_band", True)
    elif args.which == "entropy-logit":
        rep = demo_entropy_logit(args.n, args.samples, args.seed)
        bad = rep["failures"] > 0 or rep["composed_failures"] > 0
    else:
        dims = [int(x) for x in args.dims.split(",")]
        rep = demo_triangular(dims, args.samples, args.seed)
        bad = not rep["monotone"]
    _emit(rep, args.out)
    return EXIT_VIOLATION if bad else EXIT_OK


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1; status 2 is reserved for violations."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="schurloewner", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    groups = p.add_subparsers(dest="group", required=True)

    def common(sp):
        sp.add_argument("--out", help="write JSON here instead of stdout")
        return sp

    lw = groups.add_parser("loewner").add_subparsers(dest="cmd", required=True)
    sp = common(lw.add_parser("build", help="Loewner matrix with PSD and ordering checks"))
    sp.add_argument("--function", required=True, help="e.g. sqrt, power:0.5, affine:2,1")
    sp.add_argument("--spectrum", required=True, help=".json array or one value per line")
    sp.add_argument("--deg-tol", type=float, default=1e-10)
    sp.set_defaults(func=cmd_loewner_build)

    bd = groups.add_parser("bounds").add_subparsers(dest="cmd", required=True)
    sp = common(bd.add_parser("compute", help="all bounds and the best per q"))
    sp.add_argument("--function", required=True)
    sp.add_argument("--spectrum", required=True)
    sp.add_argument("--q", action="append", default=None, help="Schatten index, repeatable; 'inf' allowed")
    sp.add_argument("--method", choices=("closed", "recursive"), default="recursive")
    sp.set_defaults(func=cmd_bounds_compute)

    es = groups.add_parser("estimate")
    es.add_argument("kind", choices=("hermitian", "sampling", "commutator", "wstar"))
    common(es)
    es.add_argument("--function")
    es.add_argument("--spectrum")
    es.add_argument("--matrix", help="matrix JSON {n, re, im}: B for commutator, Y for wstar")
    es.add_argument("--q", default="1")
    es.add_argument("--samples", type=int, default=200)
    es.add_argument("--restarts", type=int, default=64)
    es.add_argument("--max-iters", type=int, default=500)
    es.add_argument("--seed", type=int, default=0)
    es.set_defaults(func=cmd_estimate)

    vr = groups.add_parser("verify").add_subparsers(dest="cmd", required=True)
    sp = common(vr.add_parser("run", help="run a verification campaign"))
    sp.add_argument("--config", help="campaign JSON; defaults to the built-in grid")
    sp.add_argument("--threads", type=int, default=None)
    sp.set_defaults(func=cmd_verify_run)

    dm = groups.add_parser("demo")
    dm.add_argument("which", choices=("abs", "entropy-logit", "triangular"))
    common(dm)
    dm.add_argument("--n", type=int, default=4)
    dm.add_argument("--r", type=int, default=2)
    dm.add_argument("--dims", default="2,4,8,16,32")
    dm.add_argument("--samples", type=int, default=200)
    dm.add_argument("--seed", type=int, default=0)
    dm.set_defaults(func=cmd_demo)
    return p


def _validate(args, parser) -> None:
    if args.group == "bounds" and not args.q:
        args.q = ["1", "2", "inf"]
    if args.group == "estimate":
        need = {"wstar": ("matrix",), "commutator": ("function",),
                "hermitian": ("function", "spectrum"), "sampling": ("function", "spectrum")}[args.kind]
        missing = [n for n in need if not getattr(args, n)]
        if args.kind == "commutator" and not (args.matrix or args.spectrum):
            missing.append("matrix or spectrum")
        if missing:
            parser.error(f"estimate {args.kind} needs --{', --'.join(missing)}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    _validate(args, parser)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
