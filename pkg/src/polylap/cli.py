"""Command-line driver.

Exit codes: 0 all verdicts pass, 1 some verdict fails, 2 usage or parse
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import bounds, experiments, fourier, report
from .eigen import EigensolverError, eigen_sym
from .lattice import MAX_SPECTRUM_VERTICES, DomainError, LatticeDomain, parse_domain
from .operator import AssemblyError, assemble

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _load_domain(spec: str):
    dom = parse_domain(spec)
    if len(dom) > MAX_SPECTRUM_VERTICES:
        raise UsageError(f"domain has {len(dom)} vertices; full-spectrum cap is {MAX_SPECTRUM_VERTICES}")
    return dom


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_spectrum(args) -> int:
    dom = _load_domain(args.domain)
    op = assemble(dom, args.order)
    spec = eigen_sym(op.matrix, want_vectors=args.vectors)
    payload = spec.to_dict()
    if args.matrix_market:
        from .operator import dump_matrix_market

        with open(args.matrix_market, "w") as fh:
            dump_matrix_market(op, fh)
    _write(report.to_json(payload), args.out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    dom = _load_domain(args.domain)
    if not isinstance(dom, LatticeDomain):
        raise UsageError("bounds are stated for subgraphs of Z^d; use a box, ball or explicit domain")
    result = bounds.verify_bounds(dom, args.order, args.kmax)
    _write(report.emit_report(result, args.format), args.out)
    return EXIT_OK if result.all_pass else EXIT_FAIL


def cmd_compare(args) -> int:
    dom = _load_domain(args.domain)
    with ThreadPoolExecutor(max_workers=max(1, min(2, experiments.pool_size()))) as pool:
        result = bounds.compare_orders(dom, args.order, args.kmax, pool=pool)
    _write(report.emit_report(result, args.format), args.out)
    return EXIT_OK if result.all_pass else EXIT_FAIL


def cmd_exhaustion(args) -> int:
    try:
        result = experiments.run_exhaustion(args.shape, args.dim, args.order, args.k, args.sizes)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _write(report.emit_report(result, args.format), args.out)
    return EXIT_OK if result.monotone else EXIT_FAIL


def cmd_fourier(args) -> int:
    dom = _load_domain(args.domain)
    if not isinstance(dom, LatticeDomain):
        raise UsageError("Fourier checks need a subgraph of Z^d")
    rng = np.random.default_rng(args.seed)
    f = rng.standard_normal(len(dom))
    op = assemble(dom, args.order)
    planch = fourier.plancherel_check(dom, f)
    poly = fourier.polylaplace_fourier_check(dom, f, args.order, op=op)
    hz = fourier.hz_operator_bound_check(dom, args.order, op=op)
    payload = {
        "plancherel": planch.to_dict(),
        "polylaplace": poly.to_dict(),
        "hz_bound": {"max_slack": hz.max_slack, "scale": hz.scale, "nodes": hz.nodes, "ok": hz.ok},
    }
    _write(report.to_json(payload), args.out)
    ok = planch.rel_err <= 1e-10 and poly.rel_err <= 1e-10 and hz.ok
    return EXIT_OK if ok else EXIT_FAIL


def cmd_fig1(args) -> int:
    try:
        series = experiments.run_appendix_fig1(args.k, args.n_list)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _write(report.emit_report(series, args.format), args.out)
    if args.plot:
        Path(args.plot).write_text(report.emit_svg(series))
    return EXIT_OK if all(r < 1.0 for r in series.ratios) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polylap",
        description="Dirichlet poly-Laplace spectra and eigenvalue bounds on lattice subgraphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, domain=True, kmax=False):
        if domain:
            p.add_argument("--domain", required=True,
                           help="domain JSON file or inline JSON, e.g. "
                                '\'{"kind":"box","d":2,"lo":[0,0],"hi":[9,9]}\'')
        p.add_argument("--order", "-l", type=int, default=1, help="poly-Laplace order l (default 1)")
        if kmax:
            p.add_argument("--kmax", type=int, default=None, help="largest k to report")
        p.add_argument("--out", "-o", default=None, help="output path (default stdout)")

    p = sub.add_parser("spectrum", help="full Dirichlet spectrum as JSON")
    common(p)
    p.add_argument("--vectors", action="store_true", help="also compute eigenvectors and residuals")
    p.add_argument("--matrix-market", default=None, help="dump the operator matrix to this path")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("bounds", help="check the averaged upper and lower eigenvalue bounds")
    common(p, kmax=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("compare-orders", help="compare (lambda_k^l)^2 with lambda_k^{2l}")
    common(p, kmax=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("exhaustion", help="eigenvalues along nested boxes or balls")
    common(p, domain=False)
    p.add_argument("--shape", choices=("box", "ball"), default="box")
    p.add_argument("--dim", "-d", type=int, default=1)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--sizes", type=_int_list, default=[10, 20, 40, 80])
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_exhaustion)

    p = sub.add_parser("fourier-check", help="Plancherel, quadratic-form and h_z bound checks")
    common(p)
    p.add_argument("--seed", type=int, default=0, help="seed for the random test function")
    p.set_defaults(func=cmd_fourier)

    p = sub.add_parser("fig1", help="ratio (lambda_k^1)^2 / lambda_k^2 on growing paths")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--n-list", type=_int_list, default=[25, 50, 100, 200, 400])
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--plot", default=None, help="write an SVG chart to this path")
    p.add_argument("--out", "-o", default=None)
    p.set_defaults(func=cmd_fig1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "order", 1) < 1:
        parser.error("--order must be >= 1")
    if getattr(args, "kmax", None) is None and args.command == "bounds":
        args.kmax = 10 ** 9
    try:
        return args.func(args)
    except (DomainError, UsageError) as exc:
        print(f"polylap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EigensolverError, AssemblyError, ArithmeticError, fourier.CertificateError) as exc:
        print(f"polylap: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
