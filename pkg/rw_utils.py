import logging
import os

import numpy as np
import pandas as pd
from tabulate import tabulate

logger = logging.getLogger(__name__)

TABLE_ARGS = dict(tablefmt='plain',
                  floatfmt='.4f',
                  numalign='center',
                  stralign='center')


def format_table(data, showindex=False):
    """Render a DataFrame / array / list as a plain text table"""
    if isinstance(data, pd.DataFrame):
        return tabulate(data,
                        headers=list(data.columns),
                        showindex=showindex,
                        **TABLE_ARGS)
    if isinstance(data, (np.ndarray, np.generic, list)):
        return tabulate(data, **TABLE_ARGS)
    raise TypeError(f'Unsupported datatype: {type(data).__name__}')


def tabulate_and_print(CONFIG, data, file_name, showindex=False):
    """Convert a dataframe into table and print to file

    Args:
        CONFIG (dict): configuration information
        data (DataFrame): dataframe object to tabulate
        file_name (str): output filename
        showindex (bool, optional): print the index. Defaults to False.
    """
    write_text(CONFIG, format_table(data, showindex) + '\n', file_name)


def write_frame(CONFIG, df, file_name, index=False):
    """Save a DataFrame as CSV in the output folder"""
    path = os.path.join(CONFIG['SAVE_DIR'], file_name)
    df.to_csv(path, index=index, lineterminator='\n')
    logger.info('Wrote %s', path)
    return path


def write_text(CONFIG, text, file_name):
    path = os.path.join(CONFIG['SAVE_DIR'], file_name)
    with open(path, 'w', encoding='utf-8', newline='\n') as file_h:
        file_h.write(text)
    logger.info('Wrote %s', path)
    return path
