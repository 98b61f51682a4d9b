"""
Command line entry point: `tunnelers <command> [flags]`.
"""
import argparse
import logging
import sys
from typing import List, Optional

from tunnelers.core.exceptions import TunnelersError
from tunnelers.reporting.config import parse_config
from tunnelers.reporting.runner import COMMANDS, run_all

# flag name -> (RunConfig field, type, help)
FLAGS = {
    '--v0': ('v0', float, 'barrier height'),
    '--d': ('d', float, 'barrier half width'),
    '--m': ('m', float, 'particle mass'),
    '--k-av': ('k_av', float, 'mean momentum of the packet'),
    '--delta': ('delta', float, 'width parameter of the packet'),
    '--x0': ('x0', float, 'initial position of the packet peak'),
    '--epsilon': ('epsilon', float, 'absolute dwell gate for the transmission and reflection times, 0 for relative'),
    '--epsilon-relative': ('epsilon_relative', float, 'dwell gate as a fraction of the dwell time'),
    '--t-max': ('t_max', float, 'end of the probability trace'),
    '--n-k': ('n_k', int, 'number of momentum intervals of the trace'),
    '--trace-method': ('trace_method', str, 'spatial or spectral evaluation of P2'),
    '--out-dir': ('out_dir', str, 'output directory'),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='tunnelers',
        description='Gaussian packet on a rectangular barrier: packet times, stationary times and depletion',
    )
    parser.add_argument('command', choices=list(COMMANDS), help='which results to produce')
    parser.add_argument('--config', default=None, help='key = value configuration file')
    for flag, (dest, kind, text) in FLAGS.items():
        parser.add_argument(flag, dest=dest, type=kind, default=None, help=text)
    parser.add_argument('-v', '--verbose', action='count', default=0, help='-v for progress, -vv for details')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Runs a command and returns 0 when every enabled acceptance check passed, 1 when one failed,
    2 on invalid input or a failed stage
    """
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    overrides = {dest: getattr(args, dest) for dest, _, _ in FLAGS.values()}
    try:
        config = parse_config(args.config, overrides)
        manifest = run_all(config, args.command)
    except TunnelersError as error:
        print(f'tunnelers: {error}', file=sys.stderr)
        return 2
    failed = [check['name'] for check in manifest.checks if not check['passed']]
    if failed:
        print(f'tunnelers: failed checks: {", ".join(failed)}', file=sys.stderr)
        return 1
    return 0


if __name__ == '__main__':
    raise SystemExit(main())
