import argparse
import logging
import sys
from dataclasses import fields
from pathlib import Path
from typing import Optional, Sequence

from dotenv import load_dotenv

from .commands import RunCommands
from .errors import ForestFireError, MetricUndefinedError, ParameterError, ValidationError
from .utils.config import Config, RunConfig

logger = logging.getLogger(__name__)

USAGE_ERRORS = (ValidationError, ParameterError, MetricUndefinedError)


class CommandParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors on one line and exits 2"""

    def error(self, message: str):
        self.exit(2, f"error: {message}\n")


def _kernel_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--kernel', choices=['gaussian', 'adaptive'], default='gaussian')
    parser.add_argument('--sigma', type=float, help="Gaussian kernel bandwidth")
    parser.add_argument('--k', type=int, help="Adaptive kernel neighbour rank")
    parser.add_argument('--alpha', type=float, help="Adaptive kernel decay exponent")


def build_parser(config: Config) -> CommandParser:
    common = CommandParser(add_help=False)
    common.add_argument('--seed', type=int, default=0)
    common.add_argument('--threads', type=int, default=None,
                        help="Worker cap for Monte Carlo trials (0 = all cores); overrides FFC_THREADS")
    noise = common.add_mutually_exclusive_group()
    noise.add_argument('-v', '--verbose', action='store_true')
    noise.add_argument('-q', '--quiet', action='store_true')

    parser = CommandParser(prog='forest-fire', description="Forest Fire clustering and validation")
    sub = parser.add_subparsers(dest='command', required=True, metavar='command')

    cluster = sub.add_parser('cluster', parents=[common], help="Cluster a data matrix")
    cluster.add_argument('--input', type=Path, required=True)
    _kernel_flags(cluster)
    cluster.add_argument('--c', type=float, help="Fire temperature")
    cluster.add_argument('--labels-out', dest='labels_out', type=Path, required=True)
    cluster.add_argument('--trace-out', dest='trace_out', type=Path, required=True)

    validate = sub.add_parser('validate', parents=[common], help="Monte Carlo validation of a labeling")
    validate.add_argument('--input', type=Path, required=True)
    validate.add_argument('--labels', dest='labels_in', type=Path, required=True)
    _kernel_flags(validate)
    validate.add_argument('--c', type=float, help="Fire temperature")
    validate.add_argument('--trials', type=int, default=config.get_trials())
    validate.add_argument('--alpha-cutoff', dest='alpha_cutoff', type=float, default=config.get_alpha())
    validate.add_argument('--conditional', action='store_true',
                          help="Judge significance among the trials that reached each point")
    validate.add_argument('--report-out', dest='report_out', type=Path, required=True)

    extend = sub.add_parser('extend', parents=[common], help="Assign labels to new points")
    extend.add_argument('--train', type=Path, required=True)
    extend.add_argument('--train-labels', dest='train_labels', type=Path, required=True)
    extend.add_argument('--new', type=Path, required=True)
    _kernel_flags(extend)
    extend.add_argument('--c', type=float, help="Fire temperature")
    extend.add_argument('--labels-out', dest='labels_out', type=Path, required=True)
    extend.add_argument('--trace-out', dest='trace_out', type=Path)

    gen = sub.add_parser('gen', parents=[common], help="Generate a Gaussian mixture on a circle")
    gen.add_argument('--n', type=int, default=500)
    gen.add_argument('--k', '--components', dest='components', type=int, default=8)
    gen.add_argument('--sigma', '--spread', dest='spread', type=float, default=0.15)
    gen.add_argument('--radius', type=float, default=1.0)
    gen.add_argument('--doublets', type=int, default=0)
    gen.add_argument('--output', type=Path, required=True)
    gen.add_argument('--labels-out', dest='labels_out', type=Path, required=True)

    score = sub.add_parser('score', parents=[common], help="Score predicted labels against reference labels")
    score.add_argument('--pred', type=Path, required=True)
    score.add_argument('--truth', type=Path, required=True)
    score.add_argument('--input', type=Path, help="Data matrix; adds the silhouette score")
    score.add_argument('--report', dest='report_in', type=Path,
                       help="Validation report; only significant points are scored")

    sweep = sub.add_parser('sweep', parents=[common], help="Cluster across a grid of fire temperatures")
    sweep.add_argument('--input', type=Path, required=True)
    _kernel_flags(sweep)
    sweep.add_argument('--c-grid', dest='c_grid', type=float, nargs='+', required=True)
    sweep.add_argument('--truth', type=Path)
    sweep.add_argument('--output', type=Path, required=True)
    return parser


def to_run_config(args: argparse.Namespace, config: Config) -> RunConfig:
    """Keep the flags RunConfig knows about and fill in configured defaults."""
    known = {f.name for f in fields(RunConfig)}
    values = {name: value for name, value in vars(args).items() if name in known}
    if values.get('threads') is None:
        values['threads'] = config.get_threads()
    if 'c_grid' in values:
        values['c_grid'] = tuple(values['c_grid'])
    return RunConfig(**values)


def _log_level(args: argparse.Namespace, config: Config) -> int:
    if args.verbose:
        return logging.DEBUG
    if args.quiet:
        return logging.WARNING
    return config.get_log_level()


def _diagnostic(e: BaseException) -> str:
    return ' '.join(str(e).split()) or type(e).__name__


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse flags, run one command and return its exit code."""
    load_dotenv()
    config = Config()
    parser = build_parser(config)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    level = _log_level(args, config)
    logging.basicConfig(level=level)
    logging.getLogger('forest_fire').setLevel(level)

    try:
        RunCommands().dispatch(to_run_config(args, config))
    except USAGE_ERRORS as e:
        print(f"error: {_diagnostic(e)}", file=sys.stderr)
        return 2
    except (ForestFireError, OSError) as e:
        print(f"error: {_diagnostic(e)}", file=sys.stderr)
        return 1
    except Exception as e:
        logger.debug("Unexpected failure", exc_info=True)
        print(f"error: {_diagnostic(e)}", file=sys.stderr)
        return 1
    return 0
