# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

import sys

from prettytable import PrettyTable

from topocell.utils.colors import bold, cyan, green, red, yellow


def print_info(message):
    print(bold(cyan("[*]")) + f" {message}", file=sys.stderr)


def print_warning(message):
    print(bold(yellow("[!]")) + f" WARNING: {message}", file=sys.stderr)


def print_error(message):
    print(bold(red("[!]")) + f" ERROR: {message}", file=sys.stderr)


def print_success(message):
    print(bold(green("[+]")) + f" DONE: {message}", file=sys.stderr)


def table(header, rows, float_format=".6g"):
    tb = PrettyTable(header)
    tb.align = "l"
    tb.padding_width = 1
    tb.float_format = float_format

    for row in rows:
        tb.add_row(row)

    return tb
