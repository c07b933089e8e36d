# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

from typing import Dict, Sequence

import numpy as np
import plotly.graph_objects as go

from topocell.core.struct.reportobject import MetricReport


def per_class_fd_chart(report: MetricReport, path, font_size: int = 16):
    """
    Bar chart of the per-class Frechet distances of a report, written as
    SVG. Skipped classes are drawn as empty bars.
    """
    values = [
        0.0 if value is None else value for value in report.per_class_fd or []
    ]
    fig = go.Figure(
        go.Bar(
            x=report.class_names,
            y=values,
            text=[f"{v:.4g}" for v in values],
            textposition="outside",
        )
    )
    fig.update_layout(
        title={"text": f"<b>TopoFD {report.topofd:.4g}</b>"},
        title_x=0.5,
        font=dict(size=font_size),
        xaxis_title="Cell class",
        yaxis_title="Frechet distance",
        showlegend=False,
    )
    fig.write_image(str(path), format="svg")
    return fig


def betti_chart(thresholds: Sequence[float], curves: Dict[int, np.ndarray],
                path, font_size: int = 16):
    """
    Step plot of Betti curves, one trace per dimension, written as SVG.
    """
    fig = go.Figure()
    for dim, counts in sorted(curves.items()):
        fig.add_trace(
            go.Scatter(
                x=list(thresholds),
                y=list(counts),
                mode="lines",
                line=dict(shape="hv", width=3),
                name=f"beta_{dim}",
            )
        )
    fig.update_layout(
        font=dict(size=font_size),
        xaxis_title="Threshold",
        yaxis_title="Betti number",
    )
    fig.write_image(str(path), format="svg")
    return fig
