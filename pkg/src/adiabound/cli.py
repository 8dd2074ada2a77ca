"""Command-line front end: ``adiabound {simulate,bands,verify,scaling}``.

Canonical results go to ``--out`` (or standard output); progress and errors go
to standard error through :mod:`logging`.

Exit codes: 0 success, 1 failed verification, 2 configuration or I/O error,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
import time

import numpy as np

from . import __version__
from .bounds import (BoundKind, area_ratios, band, build_trace, lemma_s2_check,
                     verify_inequality_chain)
from .config import RunConfig, load_config
from .errors import ConfigError, DomainError, NumericalError
from .evolution import evolve_dense, evolve_fixed, evolve_many_body
from .metrics import (check_decomposition, delta_e0, qsl_variants_for_record,
                      r_quadrature, random_states)
from .model import (DenseModel, DriveProtocol, c_n, delta_v_closed, delta_v_exact,
                    oc_exact, r_closed)
from .output import bands_svg, columns_to_rows, curves_svg, write_csv
from .reports import CheckReport
from .scaling import scaling_report
from .smallmat import DenseHermitian

log = logging.getLogger("adiabound")

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

BANDS_COLUMNS = ("lambda", "lower_old", "upper_old", "lower_sin", "upper_sin",
                 "lower_g", "upper_g", "F", "C")
REPORT_HEADER = "check,min_slack,result"


class _Sink:
    """Text destination: a file path, or standard output when ``path`` is None."""

    def __init__(self, path):
        self.path = path

    def __enter__(self):
        if self.path is None:
            self._fh = None
            return sys.stdout
        self._fh = open(self.path, "w", encoding="utf-8", newline="")
        return self._fh

    def __exit__(self, *exc):
        if self._fh is not None:
            self._fh.close()


def _trace(cfg: RunConfig):
    p = cfg.model()
    protocol = cfg.protocol()
    log.info("evolving N=%d on %d points up to lambda=%.6g", p.N, len(protocol.grid),
             protocol.lambda_max)
    t0 = time.perf_counter()
    record = evolve_many_body(p, protocol, cfg.integrator())
    log.info("converged with %d substeps per interval (%d doublings) in %.2fs",
             record.substeps, record.halvings, time.perf_counter() - t0)
    return p, record, build_trace(p, protocol, cfg.integrator(), record)


def cmd_simulate(cfg: RunConfig) -> int:
    _, _, trace = _trace(cfg)
    with _Sink(cfg.out) as fh:
        write_csv(fh, trace.CSV_COLUMNS, columns_to_rows(trace.columns()))
    if cfg.svg:
        curves_svg(trace, f"N = {cfg.N}").save(cfg.svg)
    log.info("max |F - C| = %.3g", float(np.max(np.abs(trace.f_minus_c))))
    return EXIT_OK


def cmd_bands(cfg: RunConfig) -> int:
    _, _, trace = _trace(cfg)
    bands = [band(trace, k) for k in (BoundKind.OLD, BoundKind.SIN, BoundKind.G)]
    rows = zip(trace.lambda_grid, *[a for b in bands for a in (b.lower, b.upper)],
               trace.F, trace.C)
    with _Sink(cfg.out) as fh:
        write_csv(fh, BANDS_COLUMNS, rows)
    if cfg.svg:
        bands_svg(trace, bands, f"N = {cfg.N}").save(cfg.svg)
    sin_ratio, g_ratio = area_ratios(trace)
    # keep standard output parseable when it already carries the CSV
    stream = sys.stdout if cfg.out else sys.stderr
    print(f"area_ratio_green_blue,{sin_ratio:.17g}", file=stream)
    print(f"area_ratio_red_blue,{g_ratio:.17g}", file=stream)
    return EXIT_OK


def _relative_check(name, value, reference, rtol) -> CheckReport:
    value = np.atleast_1d(np.asarray(value, dtype=float))
    reference = np.atleast_1d(np.asarray(reference, dtype=float))
    err = np.abs(value - reference) / np.abs(reference)
    return CheckReport(name, float(rtol - err.max()), 0.0)


def _closed_form_checks(cfg: RunConfig) -> list[CheckReport]:
    p = cfg.model()
    grid = cfg.protocol().grid
    inner = grid[1:]
    out = [
        _relative_check("delta_v_closed_form", delta_v_exact(p), delta_v_closed(p), 1e-12),
        _relative_check("r_quadrature", r_quadrature(p, grid, "moments")[1:],
                        r_closed(p, inner), 1e-8),
        _relative_check("delta_e0_moments", delta_e0(p, inner, "moments"),
                        delta_e0(p, inner, "closed"), 1e-10),
    ]
    worst = math.inf
    for n in cfg.N_list:
        q = p.replace(N=int(n))
        lam = 0.1 * c_n(q) ** -0.5
        slope = float(oc_exact(q, lam)) / lam**2
        worst = min(worst, 0.05 - abs(slope + c_n(q)) / c_n(q))
    out.append(CheckReport("oc_asymptotic_slope", worst, 0.0))
    return out


def _dense_oracle_check(cfg: RunConfig, points: int = 65, substeps: int = 8) -> CheckReport:
    """Mode engine against brute force on a chain of at most three cells."""
    p = cfg.model().replace(N=min(cfg.N, 3))
    protocol = DriveProtocol.uniform(cfg.effective_lambda_max(), points)
    traj = evolve_dense(DenseModel(p), protocol, substeps)
    rec = evolve_fixed(p, protocol, substeps, backend=cfg.backend)
    err = max(np.max(np.abs(traj.log_fidelity - rec.log_fidelity)),
              np.max(np.abs(traj.log_oc - oc_exact(p, protocol.grid))))
    return CheckReport("dense_oracle", float(1e-8 - err), 0.0)


def _decomposition_check(cfg: RunConfig, dims=range(2, 9)) -> CheckReport:
    rng = np.random.default_rng([cfg.seed, 1])
    dims = list(dims)
    worst = math.inf
    for t in range(cfg.decomposition_trials):
        d = dims[t % len(dims)]
        z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        a = DenseHermitian(0.5 * (z + z.conj().T))
        rep = check_decomposition(a, random_states(rng, d, 1)[0])
        worst = min(worst, 1e-10 - max(rep.residual, rep.overlap))
    return CheckReport("decomposition", worst, 0.0)


def run_checks(cfg: RunConfig) -> list[CheckReport]:
    p, record, trace = _trace(cfg)
    reports = list(verify_inequality_chain(trace))
    reports.extend(qsl_variants_for_record(p, record))
    log.info("lemma check: %d trials, seed %d", cfg.lemma_trials, cfg.seed)
    reports.extend(lemma_s2_check(cfg.seed, cfg.lemma_trials))
    reports.append(_decomposition_check(cfg))
    reports.extend(_closed_form_checks(cfg))
    reports.append(_dense_oracle_check(cfg))
    return reports


def format_report(reports) -> str:
    return "\n".join([REPORT_HEADER, *(r.line() for r in reports)]) + "\n"


def cmd_verify(cfg: RunConfig) -> int:
    reports = run_checks(cfg)
    text = format_report(reports)
    sys.stdout.write(text)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    failed = [r.name for r in reports if not r.passed]
    if failed:
        log.error("failed checks: %s", ", ".join(failed))
        return EXIT_VERIFY
    return EXIT_OK


def cmd_scaling(cfg: RunConfig) -> int:
    from .scaling import ScalingReport

    rows = []
    for n in cfg.N_list:
        p = cfg.model().replace(N=int(n))
        log.info("scaling point N=%d", p.N)
        rows.append(scaling_report(p, cfg.epsilon, cfg.integrator(), cfg.grid_points).row())
    with _Sink(cfg.out) as fh:
        write_csv(fh, ScalingReport.CSV_COLUMNS, rows)
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "bands": cmd_bands, "verify": cmd_verify,
            "scaling": cmd_scaling}


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adiabound",
        description="Adiabatic fidelity bounds for the driven Rice-Mele chain.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--set", metavar="KEY=VALUE", action="append", default=[],
                        dest="assignments", help="override one config key (repeatable)")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--svg", metavar="PATH", help="also write an SVG figure")
    common.add_argument("--seed", type=_u64, metavar="U64")
    common.add_argument("--n", type=int, dest="N", metavar="N", help="number of unit cells")
    common.add_argument("--lambda-max", type=float, dest="lambda_max", metavar="X")
    common.add_argument("--gamma", type=float, dest="Gamma", metavar="X", help="driving rate")
    common.add_argument("--threads", type=int, metavar="K")
    common.add_argument("--scaled-window", action="store_const", const="scaled", dest="window",
                        help="use lambda_max = 0.2 * sqrt(1000 / N)")
    common.add_argument("-q", "--quiet", action="store_true", help="only log warnings and errors")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="fidelity, overlap and bound curves")
    sub.add_parser("bands", parents=[common], help="two-sided fidelity bands and area ratios")
    sub.add_parser("verify", parents=[common], help="run every inequality and cross-check")
    sub.add_parser("scaling", parents=[common], help="mean free path and rate bound versus N")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(name)s: %(message)s", stream=sys.stderr, force=True)
    overrides = {k: getattr(args, k) for k in
                 ("out", "svg", "seed", "N", "lambda_max", "Gamma", "threads", "window")}
    try:
        cfg = load_config(args.config, args.assignments, overrides)
        return COMMANDS[args.command](cfg)
    except (ConfigError, DomainError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_CONFIG
    except NumericalError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
