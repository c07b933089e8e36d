# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

import logging
from datetime import datetime
from logging import FileHandler, Formatter

from topocell import config

TIMESTAMPS = datetime.now().strftime("%Y-%m-%d")
LOG_FILE_NAME = f"{config.LOG_DIR}/{TIMESTAMPS}.topocell.log"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s [%(lineno)d]: %(message)s"

defaultFormatter = Formatter(LOG_FORMAT)
defaultHandler = FileHandler(LOG_FILE_NAME, mode="a", delay=True)
defaultHandler.setFormatter(defaultFormatter)

_loggers = []


def get_logger(name):
    """
    Return a module logger writing to the shared log file.

    The logger stays disabled unless debugging was switched on through
    ``config.DEBUG`` or :func:`enable_debug`.

    :param name: module name, usually ``__name__``
    :return: a logging.Logger
    """
    log = logging.getLogger(name)
    log.setLevel(logging.DEBUG)
    if defaultHandler not in log.handlers:
        log.addHandler(defaultHandler)
    log.disabled = not config.DEBUG
    _loggers.append(log)
    return log


def enable_debug():
    config.DEBUG = True
    for log in _loggers:
        log.disabled = False
