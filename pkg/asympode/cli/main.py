"""Command line front end: one subcommand per pipeline stage plus `run` for all of them."""
from pathlib import Path
from typing import Callable, Optional, Sequence
import argparse
import json
import logging
import sys

from ..base.exceptions import AsympodeError, VerificationError
from ..expansion.constants import RESONANCE_POLICIES
from ..spectral.decomposition import eigen_table
from .constants import DEFAULT_OUTPUT, EXIT_OK
from .pipeline import Pipeline, record_error, run_pipeline
from .problem import ProblemFile, load_problem, with_overrides

logger = logging.getLogger('asympode')


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
        force=True,
    )


def load(args: argparse.Namespace) -> ProblemFile:
    """Problem file with the command line overrides applied."""
    return with_overrides(
        load_problem(args.problem),
        n_terms=getattr(args, 'n_terms', None),
        resonance=getattr(args, 'resonance', None),
        horizon=getattr(args, 'horizon', None),
        tol_abs=getattr(args, 'tol_abs', None),
        tol_rel=getattr(args, 'tol_rel', None),
        snap_tol=getattr(args, 'snap_tol', None),
        count=getattr(args, 'count', None),
    )


def _run_stage(args: argparse.Namespace, body: Callable[[Pipeline], int]) -> int:
    try:
        problem = load(args)
    except AsympodeError as e:
        print(f'error: {e}', file=sys.stderr)
        return record_error(Path(args.out or DEFAULT_OUTPUT), 'setup', e)

    pipeline = Pipeline(problem, args.out, args.dump_tensors)
    try:
        pipeline.prepare()
        return body(pipeline)
    except AsympodeError as e:
        logger.debug(f'Stage {pipeline.stage} failed', exc_info=True)
        print(f'error: {e}', file=sys.stderr)
        return pipeline.record_error(e)


def command_spectral(args: argparse.Namespace) -> int:
    def body(pipeline: Pipeline) -> int:
        sd = pipeline.spectral()
        rows = eigen_table(sd)
        if args.format == 'json':
            print(json.dumps({'c0': sd.c0, 'exact': sd.exact, 'eigenvalues': rows}, indent=2, sort_keys=True))
            return EXIT_OK
        print(f'{"j":>3}  {"eigenvalue":>20}  {"mult":>4}  snapped')
        for row in rows:
            print(f'{row["j"]:>3}  {row["eigenvalue"]:>20}  {row["multiplicity"]:>4}  {row["snapped"]}')
        print(f'c0 = {sd.c0:.6g}')
        return EXIT_OK
    return _run_stage(args, body)


def command_simulate(args: argparse.Namespace) -> int:
    def body(pipeline: Pipeline) -> int:
        traj = pipeline.simulate()
        print(f'{len(traj)} samples on [0, {traj.horizon:g}], termination {traj.termination}, '
              f'{traj.accepted} accepted / {traj.rejected} rejected steps')
        return EXIT_OK
    return _run_stage(args, body)


def command_first_approx(args: argparse.Namespace) -> int:
    def body(pipeline: Pipeline) -> int:
        first = pipeline.first_approx()
        if args.format == 'json':
            print(first.model_dump_json(indent=2))
        else:
            xi = ', '.join(f'{v:.10g}' for v in first.xi)
            print(f'lam* = {first.lam_star} (block {first.n0}), xi* = ({xi})')
        return EXIT_OK
    return _run_stage(args, body)


def command_exponents(args: argparse.Namespace) -> int:
    def body(pipeline: Pipeline) -> int:
        _, table = pipeline.exponents(args.count, args.format)
        print(table.rstrip('\n'))
        return EXIT_OK
    return _run_stage(args, body)


def command_expand(args: argparse.Namespace) -> int:
    def body(pipeline: Pipeline) -> int:
        series = pipeline.expand()
        for term in series.terms:
            print(f'q_{term.n}  mu = {term.mu}  degree {term.polynomial.degree}')
        return EXIT_OK
    return _run_stage(args, body)


def command_verify(args: argparse.Namespace) -> int:
    def body(pipeline: Pipeline) -> int:
        report = pipeline.verify()
        for fit in report.fits:
            print(f'u_{fit.n}: {fit.verdict}  {fit.message}')
        if report.caveat:
            print(f'note: {report.caveat}')
        if not report.passed:
            raise VerificationError(report.failure())
        return EXIT_OK
    return _run_stage(args, body)


def command_run(args: argparse.Namespace) -> int:
    try:
        problem = load(args)
    except AsympodeError as e:
        print(f'error: {e}', file=sys.stderr)
        return record_error(Path(args.out or DEFAULT_OUTPUT), 'setup', e)
    code, out = run_pipeline(problem, args.out, args.dump_tensors)
    if code == EXIT_OK:
        print(f'all checks passed; artifacts in {out}')
    else:
        print(f'failed with exit code {code}; see {out / "error.json"}', file=sys.stderr)
    return code


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--problem', type=Path, required=True, help='Problem file (JSON).')
    parser.add_argument('--out', type=Path, default=None,
                        help=f'Run directory (default: the problem\'s "output", else {DEFAULT_OUTPUT}).')
    parser.add_argument('--snap-tol', type=float, default=None, help='Eigenvalue snapping tolerance.')
    parser.add_argument('--verbose', action='store_true', help='Debug logging on stderr.')
    parser.add_argument('--dump-tensors', action='store_true', help='Also write tensors.json.')


def _integration(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--horizon', type=float, default=None, help='Integration horizon T.')
    parser.add_argument('--tol-abs', type=float, default=None, help='Absolute integrator tolerance.')
    parser.add_argument('--tol-rel', type=float, default=None, help='Relative integrator tolerance.')


def _expansion(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--n-terms', type=int, default=None, help='Number of terms N.')
    parser.add_argument('--resonance', choices=RESONANCE_POLICIES, default=None,
                        help='Resonant constant policy (default: fit).')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='asympode',
        description='Asymptotic expansions of decaying solutions of y\' + Ay = F(y).',
    )
    subparsers = parser.add_subparsers(dest='command', required=True)

    spectral = subparsers.add_parser('spectral', help='Eigenvalues, multiplicities and projections of A.')
    _common(spectral)
    spectral.add_argument('--format', choices=('text', 'json'), default='text')
    spectral.set_defaults(func=command_spectral)

    exponents = subparsers.add_parser('exponents', help='Table of the first rates of the expansion.')
    _common(exponents)
    exponents.add_argument('--count', type=int, default=None, help='Number of rates (default: 10).')
    exponents.add_argument('--format', choices=('text', 'json'), default='text')
    exponents.set_defaults(func=command_exponents)

    simulate = subparsers.add_parser('simulate', help='Integrate the system and write trajectory.csv.')
    _common(simulate)
    _integration(simulate)
    simulate.set_defaults(func=command_simulate)

    first = subparsers.add_parser('first-approx', help='Limit rate lam* and limit vector xi* of the trajectory.')
    _common(first)
    first.add_argument('--format', choices=('text', 'json'), default='text')
    first.set_defaults(func=command_first_approx)

    expand = subparsers.add_parser('expand', help='Compute q_1 .. q_N.')
    _common(expand)
    _expansion(expand)
    expand.set_defaults(func=command_expand)

    verify = subparsers.add_parser('verify', help='Fit the residual slopes of every truncation.')
    _common(verify)
    verify.set_defaults(func=command_verify)

    run = subparsers.add_parser('run', help='Every stage end to end.')
    _common(run)
    _integration(run)
    _expansion(run)
    run.set_defaults(func=command_run)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    return args.func(args)


if __name__ == '__main__':
    sys.exit(main())
