# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

import json

from topocell.core.generativemetrics import evaluate
from topocell.core.layout import list_layouts, load_layout
from topocell.core.ripley import k_discrepancy_test
from topocell.core.topoloss import evaluate as evaluate_loss
from topocell.errors import ParameterError
from topocell.utils.output import k_table, loss_table, metric_table
from topocell.utils.tools import clean


class Report:
    """
    This module is for users who want to use topocell as a Python module.
    """

    def __init__(self):
        self.result = None
        self._table = None

    @staticmethod
    def _load_dir(directory):
        return [load_layout(path) for path in list_layouts(directory)]

    def evaluation(self, ref_dir, syn_dir, metrics=("topofd", "mmd", "cce", "tce"),
                   **kwargs):
        """
        Compare the layouts of two directories.

        :param ref_dir: directory of reference layout CSVs
        :param syn_dir: directory of synthetic layout CSVs
        :param metrics: metrics to compute
        :param kwargs: passed on to the metric evaluation
        :return: MetricReport
        """
        self.result = evaluate(
            self._load_dir(ref_dir), self._load_dir(syn_dir), metrics, **kwargs
        )
        self._table = metric_table(self.result)
        return self.result

    def loss(self, candidate, target, weights=None):
        """
        Topological loss breakdown of a candidate layout file.

        :return: LossBreakdown
        """
        self.result, _ = evaluate_loss(
            load_layout(candidate), load_layout(target), weights, gradient=False
        )
        self._table = loss_table(self.result)
        return self.result

    def kstats(self, ref_dir, syn_dir, **kwargs):
        """
        Ripley K discrepancy tests between two directories.

        :return: KReport
        """
        self.result = k_discrepancy_test(
            self._load_dir(ref_dir), self._load_dir(syn_dir), **kwargs
        )
        self._table = k_table(self.result)
        return self.result

    def get_report(self, report_type):
        """
        Output the last result in the format given by report_type.

        :param report_type: "json" or "table"
        :return: string of the report
        """
        if self.result is None:
            raise ParameterError("No analysis has been run yet.")

        if report_type == "json":
            return json.dumps(clean(self.result.to_dict()), indent=4)
        if report_type == "table":
            return self._table.get_string()

        raise ParameterError(
            f"Report type {report_type!r} is not supported; use json or table."
        )
