# coding=utf-8
# Copyright (c) 2022, roadelev developers.  All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""roadelev initialization."""

import random

import numpy as np

from roadelev import logging
from roadelev.global_vars import get_config, reset_global_variables, set_global_variables
from roadelev.numerics import get_num_threads, set_num_threads

logger = logging.get_logger(__name__)


def initialize_roadelev(config, log_level=None, threads=None, tensorboard_dir=None):
    """Set verbosity, the thread cap and random seeds, then install the global config, timers and writer.

    ``threads`` falls back to ``config.threads``; globals from an earlier initialization are dropped first.
    """
    if log_level is not None:
        logging.set_verbosity(log_level)
    reset_global_variables()
    threads = threads if threads is not None else config.threads
    if threads is not None:
        set_num_threads(threads)
    _set_random_seed(config.seed)
    set_global_variables(config, tensorboard_dir=tensorboard_dir)
    _log_config(get_config())
    logger.info(f"> using {get_num_threads()} threads")


def _set_random_seed(seed):
    """Set random seed for reproducability."""
    if seed is not None and seed >= 0:
        random.seed(seed)
        np.random.seed(seed)
    else:
        raise ValueError('Seed ({}) should be a non-negative integer.'.format(seed))


def _log_config(config):
    """Log the configuration as a dotted table."""
    lines = ['------------------------ configuration ------------------------']
    entries = []
    for key, value in config.to_dict().items():
        dots = '.' * (48 - len(key))
        entries.append('  {} {} {}'.format(key, dots, value))
    lines.extend(sorted(entries, key=lambda x: x.lower()))
    lines.append('-------------------- end of configuration ---------------------')
    logger.info('\n'.join(lines))
