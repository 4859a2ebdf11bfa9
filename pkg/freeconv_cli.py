#!/usr/bin/env python3
"""
Free Convolution CLI - moments, convolutions and the convolution comparison measure

Usage:
  ./freeconv_cli.py moments MEASURE -N 4                  # m_1..m_N as p/q
  ./freeconv_cli.py cumulants MEASURE -N 8                # free cumulants kappa_1..kappa_N
  ./freeconv_cli.py convolve MU NU --mode free -N 4       # moments of the free convolution
  ./freeconv_cli.py convolve MU NU --mode classical       # atoms of the classical convolution
  ./freeconv_cli.py ccm MU NU --moments 2                 # comparison-moment table (JSON)
  ./freeconv_cli.py ccm MU NU --grid 32x32 --tol 1e-6     # comparison density w (CSV)
  ./freeconv_cli.py omega MEASURE --grid 64x64            # omega of the measure embedding (CSV)
  ./freeconv_cli.py verify --suite all --seed 7           # run the verification suites

Common options: --out PATH, --threads K (FREECONV_THREADS wins), --verbose
Exit codes: 0 ok, 1 verification failed, 2 bad input, 3 no convergence
"""

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence, Tuple

from ccm import ROUTES, ccm_density_grid, ccm_moments
from errors import DomainError, FreeConvError, VerificationFailure
from measures import classical_convolve, load_measure, moments
from momentcalc import DEFAULT_ORDER, MomentVector, cumulants_from_moments, free_convolve_moments
from spectral import embed_measure, omega_grid
from verification import OMEGA_CONSTANT, OMEGA_CONSTANT_NOTE, SUITES, format_report, run_suite

logger = logging.getLogger("freeconv")

THREADS_ENV = "FREECONV_THREADS"
DEFAULT_TOL = 1e-6


def parse_grid(text: str) -> Tuple[int, int]:
    """'NAxNB' -> (na, nb)."""
    try:
        na, nb = (int(part) for part in text.lower().split("x"))
    except ValueError as e:
        raise DomainError(f"grid must look like 32x32, got {text!r}") from e
    if na < 2 or nb < 2:
        raise DomainError(f"grid counts must be at least 2, got {text!r}")
    return na, nb


@dataclass
class CommandConfig:
    command: str
    inputs: Tuple[str, ...] = ()
    out: Optional[Path] = None
    order: int = DEFAULT_ORDER
    grid: Optional[Tuple[int, int]] = None
    tol: float = DEFAULT_TOL
    route: str = "series"
    mode: str = "free"
    suite: str = "all"
    seed: int = 0
    threads: int = 1
    verbose: bool = False

    def __post_init__(self):
        if self.tol <= 0:
            raise DomainError(f"tolerance must be positive, got {self.tol}")
        if self.order < 0:
            raise DomainError(f"order must be natural, got {self.order}")
        if self.threads < 1:
            raise DomainError(f"thread count must be at least 1, got {self.threads}")

    @classmethod
    def from_args(cls, args: argparse.Namespace, environ: Mapping[str, str]) -> "CommandConfig":
        threads = args.threads
        if environ.get(THREADS_ENV):
            try:
                threads = int(environ[THREADS_ENV])
            except ValueError as e:
                raise DomainError(f"{THREADS_ENV} must be an integer, got {environ[THREADS_ENV]!r}") from e
        order = getattr(args, "moments", None)
        if order is None:
            order = getattr(args, "order", DEFAULT_ORDER)
        grid = getattr(args, "grid", None)
        return cls(
            command=args.command,
            inputs=tuple(getattr(args, "measures", ())),
            out=Path(args.out) if args.out else None,
            order=order,
            grid=parse_grid(grid) if grid else None,
            tol=getattr(args, "tol", DEFAULT_TOL),
            route=getattr(args, "route", "series"),
            mode=getattr(args, "mode", "free"),
            suite=getattr(args, "suite", "all"),
            seed=getattr(args, "seed", 0),
            threads=threads,
            verbose=args.verbose,
        )


def emit(config: CommandConfig, text: str) -> None:
    """Data to --out or stdout, always newline-terminated."""
    if not text.endswith("\n"):
        text += "\n"
    if config.out is None:
        sys.stdout.write(text)
    else:
        config.out.write_text(text)
        status(f"✅ Wrote {config.out}")


def status(message: str) -> None:
    print(message, file=sys.stderr)


def cmd_moments(config: CommandConfig) -> int:
    mu = load_measure(config.inputs[0])
    emit(config, " ".join(str(m) for m in moments(mu, config.order)))
    return 0


def cmd_cumulants(config: CommandConfig) -> int:
    mu = load_measure(config.inputs[0])
    emit(config, str(cumulants_from_moments(MomentVector.of_measure(mu, config.order))))
    return 0


def cmd_convolve(config: CommandConfig) -> int:
    mu, nu = (load_measure(path) for path in config.inputs)
    if config.mode == "classical":
        emit(config, str(classical_convolve(mu, nu)))
    else:
        emit(config, str(free_convolve_moments(mu, nu, config.order)))
    return 0


def cmd_ccm(config: CommandConfig) -> int:
    mu, nu = (load_measure(path) for path in config.inputs)
    if config.grid is not None:
        na, nb = config.grid
        status(f"🔍 Sampling w on a {na}x{nb} grid (tol {config.tol:g}, {config.threads} threads)...")
        grid = ccm_density_grid(mu, nu, na, nb, config.tol, threads=config.threads)
        emit(config, grid.to_csv())
    else:
        status(f"🔍 Comparison moments of order {config.order} by the {config.route} route...")
        table = ccm_moments(mu, nu, config.order, route=config.route, tol=config.tol, threads=config.threads)
        emit(config, table.to_json())
    return 0


def cmd_omega(config: CommandConfig) -> int:
    mu = load_measure(config.inputs[0])
    na, nb = config.grid or (64, 64)
    embedding = embed_measure(mu)
    emit(config, omega_grid(embedding.A, embedding.B, na, nb).to_csv())
    return 0


def cmd_verify(config: CommandConfig) -> int:
    status(f"🔍 Running suite '{config.suite}' with seed {config.seed}...")
    results = run_suite(config.suite, config.seed)
    report = format_report(results)
    if config.suite in ("spectral", "all"):
        report = f"💡 omega total-mass constant {OMEGA_CONSTANT}: {OMEGA_CONSTANT_NOTE}\n" + report
    emit(config, report)
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise VerificationFailure(f"{len(failed)} check(s) failed: {', '.join(failed)}")
    status("🎉 All checks passed")
    return 0


COMMANDS = {
    "moments": cmd_moments,
    "cumulants": cmd_cumulants,
    "convolve": cmd_convolve,
    "ccm": cmd_ccm,
    "omega": cmd_omega,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write data to this file instead of stdout")
    common.add_argument("--threads", type=int, default=1, help=f"worker threads ({THREADS_ENV} overrides)")
    common.add_argument("--verbose", action="store_true", help="debug logging on stderr")

    parser = argparse.ArgumentParser(
        prog="freeconv_cli.py", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("moments", "cumulants"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("measures", nargs=1, metavar="MEASURE")
        p.add_argument("-N", dest="order", type=int, default=DEFAULT_ORDER)

    p = sub.add_parser("convolve", parents=[common])
    p.add_argument("measures", nargs=2, metavar="MEASURE")
    p.add_argument("--mode", choices=("classical", "free"), default="free")
    p.add_argument("-N", dest="order", type=int, default=DEFAULT_ORDER)

    p = sub.add_parser("ccm", parents=[common])
    p.add_argument("measures", nargs=2, metavar="MEASURE")
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--moments", type=int, metavar="N", help="table of m~(t_mu^i t_nu^j), 0 <= i, j <= N")
    target.add_argument("--grid", metavar="NAxNB", help="sample the density w")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--route", choices=ROUTES, default="series")

    p = sub.add_parser("omega", parents=[common])
    p.add_argument("measures", nargs=1, metavar="MEASURE")
    p.add_argument("--grid", metavar="NAxNB", default="64x64")

    p = sub.add_parser("verify", parents=[common])
    p.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: Optional[Sequence[str]] = None, environ: Optional[Mapping[str, str]] = None) -> int:
    """Main CLI function."""
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        print(__doc__)
        return 0
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = CommandConfig.from_args(args, os.environ if environ is None else environ)
        logger.debug("config %s", config)
        return COMMANDS[config.command](config)
    except FreeConvError as e:
        status(f"❌ {e}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
