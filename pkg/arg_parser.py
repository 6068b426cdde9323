import argparse
from typing import List, Optional

COMMANDS = ('ingest', 'simulate', 'cluster', 'report')


def arg_parser(default_args: Optional[List] = None):
    '''Read arguments from the command line

    Args:
        default_args: None/List of arguments (see examples)

    Examples::
        >>> output = arg_parser(['ingest', '--survey', 'data/table1.csv'])
        >>> output = arg_parser(['report', '--seed', '42', '--auto-k',
                                 '--out', 'Results/run42'])

    Miscellaneous:
        command: ingest | simulate | cluster | report
        survey (str): survey CSV in the published table shape
        schema (str): attribute category / weight overrides (YAML)
        config (str): run configuration (YAML)
        hdi (str): HDI values and colour ramp (YAML)
        seed (int): seed for population, disturbances, clustering and layout
        steps (int): simulation steps
        population (int): number of simulated agents
        k (int): number of clusters
        auto-k (bool): choose k by silhouette
        out (str): output folder
        n-jobs (int): worker processes for the simulation

    Values left out fall back to the run configuration file.
    '''
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--survey', type=str, default=None)
    common.add_argument('--schema', type=str, default=None)
    common.add_argument('--config', type=str, default=None)
    common.add_argument('--hdi', type=str, default=None)
    common.add_argument('--seed', type=int, default=None)
    common.add_argument('--steps', type=int, default=None)
    common.add_argument('--population', type=int, default=None)
    common.add_argument('--n-jobs', type=int, default=None)
    common.add_argument('--out', type=str, default=None)

    group = common.add_mutually_exclusive_group()
    group.add_argument('--k', type=int, default=None)
    group.add_argument('--auto-k',
                       action='store_const',
                       const=True,
                       default=None)

    parser = argparse.ArgumentParser(
        prog='culturality',
        description='Survey ingestion, transcultural factor simulation, '
        'culturality clustering and reports')
    subparsers = parser.add_subparsers(dest='command', required=True)
    subparsers.add_parser('ingest',
                          parents=[common],
                          help='validate and echo a survey table')
    subparsers.add_parser('simulate',
                          parents=[common],
                          help='synthesize agents and write trajectories')
    subparsers.add_parser('cluster',
                          parents=[common],
                          help='cluster agents by weighted similarity')
    subparsers.add_parser('report',
                          parents=[common],
                          help='ranking, cluster map and full report')

    if default_args is None:
        args = parser.parse_args()
    else:
        args = parser.parse_args(default_args)

    for name in ('steps', 'population', 'k', 'n_jobs'):
        value = getattr(args, name)
        if value is not None and value < (0 if name == 'steps' else 1):
            parser.error(f'--{name.replace("_", "-")} out of range: {value}')
    if args.seed is not None and args.seed < 0:
        parser.error(f'--seed must be non-negative: {args.seed}')

    return args
