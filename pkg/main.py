import logging
import sys
from datetime import datetime

import numpy as np
import pandas as pd

from agent_sim import (run, scenario_frame, synthesize_population,
                       trajectories_frame)
from arg_parser import arg_parser
from config import build_config, build_sim_config
from errors import CulturalityError
from plot_utils import render_cluster_map, render_trajectories
from report_utils import (cluster_summary, cohort_similarity, gender_gap,
                          load_hdi, ranking_frame)
from rw_utils import (format_table, tabulate_and_print, write_frame,
                      write_text)
from similarity_cluster import (assignments_frame, auto_k, cluster_kmedoids,
                                matrix_frame, purity, silhouette,
                                similarity_matrix)
from survey_corpus import load_schema, load_survey, save_survey, table_frame
from utils import setup_logging

logger = logging.getLogger('culturality')


def load_inputs(CONFIG):
    schema = load_schema(CONFIG['schema'])
    table = load_survey(CONFIG['survey'], schema)
    return table


def run_ingest(CONFIG, table):
    """Echo the validated table and write it back in canonical form"""
    echo = table_frame(table)
    echo.columns = [f'{society} {gender}' for society, gender in echo.columns]
    print(format_table(echo.rename_axis('attribute').reset_index()))
    save_survey(table, CONFIG['SAVE_DIR'] + 'survey.csv')
    print(f'Cohorts: {len(table.cohorts)}')


def run_simulation(CONFIG, table):
    sim_config = build_sim_config(CONFIG, table.schema)
    logger.info('Building population...')
    population = synthesize_population(table, sim_config.population_size,
                                       sim_config.seed)
    result = run(population, sim_config)

    write_frame(CONFIG, trajectories_frame(result), 'trajectories.csv')
    write_frame(CONFIG, scenario_frame(result), 'scenarios.csv')
    logger.info('Config digest: %s', result.config_digest)
    return result


def run_clustering(CONFIG, population):
    logger.info('Building similarity matrix...')
    matrix = similarity_matrix(population, population.schema.weights)

    if CONFIG['auto_k']:
        clustering, scan = auto_k(matrix,
                                  CONFIG['k_min'],
                                  CONFIG['k_max'],
                                  seed=CONFIG['seed'],
                                  n_init=CONFIG['n_init'])
        write_frame(
            CONFIG,
            pd.DataFrame({
                'k': list(scan),
                'silhouette': list(scan.values())
            }), 'silhouette_scan.csv')
    else:
        clustering = cluster_kmedoids(matrix,
                                      CONFIG['k'],
                                      seed=CONFIG['seed'],
                                      n_init=CONFIG['n_init'])
    score = silhouette(matrix, clustering) if clustering.k >= 2 else np.nan

    summary = pd.DataFrame([{
        'k': clustering.k,
        'objective': clustering.objective,
        'swaps': len(clustering.history) - 1,
        'silhouette': score,
        'purity': purity(clustering, population.societies),
    }])
    write_frame(CONFIG, assignments_frame(clustering, population),
                'assignments.csv')
    write_frame(CONFIG, matrix_frame(matrix), 'similarity_matrix.csv',
                index=True)
    write_frame(CONFIG, summary, 'clustering.csv')
    print(f'k = {clustering.k}, silhouette = {score:.4f}')
    return matrix, clustering


def run_report(CONFIG, table):
    hdi = load_hdi(CONFIG['hdi'])
    result = run_simulation(CONFIG, table)
    population = result.population
    _, clustering = run_clustering(CONFIG, population)

    ranking = ranking_frame(table, hdi)
    write_frame(CONFIG, ranking, 'ranking.csv')
    tabulate_and_print(CONFIG, ranking, 'ranking.txt')
    print(format_table(ranking))

    write_frame(CONFIG, gender_gap(table), 'gender_gap.csv', index=True)
    write_frame(CONFIG, cohort_similarity(table), 'cohort_similarity.csv',
                index=True)

    scores = result.final_values
    write_frame(CONFIG, cluster_summary(clustering, population, scores, hdi),
                'cluster_summary.csv')

    cmap, svg = render_cluster_map(clustering,
                                   scores,
                                   hdi,
                                   population.societies,
                                   width=CONFIG['map_width'],
                                   height=CONFIG['map_height'],
                                   padding=CONFIG['map_padding'],
                                   jitter=CONFIG['map_jitter'],
                                   seed=CONFIG['seed'])
    write_text(CONFIG, svg, 'cluster_map.svg')
    write_frame(CONFIG, cmap.to_frame(), 'glyphs.csv')
    write_text(CONFIG, render_trajectories(result, hdi), 'trajectories.svg')


def main(argv=None):
    """Run one subcommand

    Args:
        argv (list, optional): command line arguments. Defaults to sys.argv.

    Returns:
        int: 0 on success, 2 on input errors, 3 on numerical failures
    """
    start_time = datetime.now()
    setup_logging()
    args = arg_parser(argv)

    try:
        CONFIG = build_config(args)
        setup_logging(CONFIG['LOG_FILE'])
        logger.info('Start Time: %s', start_time.strftime('%A %m/%d/%Y '
                                                         '%H:%M:%S'))
        logger.info('Setting Random seed: %d', CONFIG['seed'])

        table = load_inputs(CONFIG)
        if args.command == 'ingest':
            run_ingest(CONFIG, table)
        elif args.command == 'simulate':
            run_simulation(CONFIG, table)
        elif args.command == 'cluster':
            sim_config = build_sim_config(CONFIG, table.schema)
            population = synthesize_population(table,
                                               sim_config.population_size,
                                               sim_config.seed)
            run_clustering(CONFIG, population)
        else:
            run_report(CONFIG, table)
    except CulturalityError as err:
        logger.error('%s: %s', type(err).__name__, err)
        return err.exit_code

    end_time = datetime.now()
    logger.info('Total runtime: %s (HH:MM:SS)', end_time - start_time)
    return 0


if __name__ == '__main__':
    sys.exit(main())
