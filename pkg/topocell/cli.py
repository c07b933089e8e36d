# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

import functools
import json
import sys
import time
from pathlib import Path

import click
import numpy as np
from pathvalidate import sanitize_filename

from topocell import __version__, config
from topocell.core.diagrammetrics import landscape
from topocell.core.distancetransform import exact_edt
from topocell.core.generativemetrics import (
    CENTER_BARYCENTER,
    CENTER_SAMPLE,
    evaluate,
)
from topocell.core.generator import generate, spawn_seeds, topology_scenario
from topocell.core.layout import (
    list_layouts,
    load_layout,
    load_layout_dir,
    save_layout,
    stamp,
)
from topocell.core.optimizer import TRACE_HEADER, optimize_layout
from topocell.core.parallel import ordered_map
from topocell.core.persistence import (
    betti_curve,
    cubical_sublevel_diagram,
    rips_diagram,
    save_diagram,
)
from topocell.core.ripley import k_discrepancy_test
from topocell.core.struct.diagramobject import (
    CUBICAL,
    RIPS,
    FiltrationSpec,
    PersistenceDiagram,
)
from topocell.core.struct.lossobject import TAU_FIXED, TAU_MEDIAN, LossWeights
from topocell.core.struct.processobject import (
    MATERN,
    POISSON,
    RING_SCENE,
    OptimizerConfig,
    PointProcessSpec,
    RingSpec,
)
from topocell.core.struct.reportobject import RunManifest
from topocell.core.topoloss import evaluate as evaluate_loss
from topocell.errors import EXIT_IO, ParameterError, TopoCellError
from topocell.utils.graph import betti_chart, per_class_fd_chart
from topocell.utils.logger import enable_debug, get_logger
from topocell.utils.output import (
    k_table,
    loss_table,
    metric_table,
    write_json,
    write_landscape,
    write_manifest,
    write_metric_csv,
    write_rows,
)
from topocell.utils.pprint import print_error, print_info, print_success
from topocell.utils.tools import (
    clean,
    layout_digests,
    parse_dims,
    parse_floats,
    parse_ints,
)

log = get_logger(__name__)

SCENARIO = "scenario"
RUN_OPTIONS = ("threads", "debug", "timing")


def common_options(func):
    """
    Options shared by every command.
    """

    @click.option(
        "--seed",
        type=click.IntRange(min=0, max=2 ** 64 - 1),
        default=0,
        show_default=True,
        help="Root seed of every random draw",
    )
    @click.option(
        "--threads",
        type=click.IntRange(min=1),
        default=1,
        show_default=True,
        help="Worker processes; results do not depend on it",
    )
    @click.option(
        "--dims",
        default=None,
        help="Homology dimensions, '1' or '0,1' [command default]",
    )
    @click.option("--debug", is_flag=True, help="Write debug logs")
    @click.option(
        "--timing", is_flag=True, help="Record wall-clock time in the manifest"
    )
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        if kwargs["debug"]:
            enable_debug()
        return func(*args, **kwargs)

    return wrapper


def handle_errors(func):
    """
    Map errors to one diagnostic line on stderr and an exit code.
    """

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except TopoCellError as error:
            log.exception(error)
            print_error(str(error))
            sys.exit(error.exit_code)
        except OSError as error:
            log.exception(error)
            print_error(str(error))
            sys.exit(EXIT_IO)

    return wrapper


class Run:
    """
    Collects what a command needs for its manifest.
    """

    def __init__(self, command: str, options: dict) -> None:
        self.command = command
        self.options = options
        self.started = time.perf_counter()
        self.inputs = []

    def add_inputs(self, paths):
        self.inputs.extend(paths)

    def manifest(self, **extra) -> RunManifest:
        parameters = {
            key: value for key, value in sorted(self.options.items())
            if key not in RUN_OPTIONS and key != "seed"
        }
        parameters.update(extra)
        wall_clock = None
        if self.options.get("timing"):
            wall_clock = round(time.perf_counter() - self.started, 6)
            log.debug(f"{self.command} took {wall_clock} s")
        return RunManifest(
            self.command,
            parameters,
            [self.options["seed"]],
            layout_digests(self.inputs),
            __version__,
            wall_clock,
        )


def _dims(options, default):
    return default if options["dims"] is None else parse_dims(options["dims"])


@click.group(no_args_is_help=True)
@click.version_option(version=__version__)
def entry_point():
    """TopoCell: persistent-homology losses and metrics for cell layouts"""


@entry_point.command(no_args_is_help=True)
@click.option("-i", "--input", "input_path", required=True,
              help="Layout CSV, or a .npy scalar field for cubical mode")
@click.option("-m", "--mode", type=click.Choice([RIPS, CUBICAL]),
              default=RIPS, show_default=True)
@click.option("-o", "--out", required=True, help="Diagram CSV to write")
@click.option("--class", "class_id", type=int, default=None,
              help="Only this class; all classes pooled by default")
@click.option("--max-scale", type=float, default=None,
              help="Rips truncation [canvas diagonal]")
@click.option("--footprint", type=int, default=config.FOOTPRINT,
              show_default=True)
@click.option("--provenance", is_flag=True,
              help="Add the b_cell,d_cell columns")
@click.option("--landscape", "landscape_path", default=None,
              help="CSV of the H1 (or H0) landscape to write")
@click.option("--levels", type=click.IntRange(min=1),
              default=config.LANDSCAPE_LEVELS, show_default=True)
@click.option("--svg", default=None, help="Betti curve chart to write")
@common_options
@handle_errors
def dgm(**options):
    """Persistence diagram of a layout or a scalar field."""
    run = Run("dgm", options)
    dims = _dims(options, (0, 1))
    path = Path(options["input_path"])
    if not path.exists():
        raise FileNotFoundError(f"Input {path} does not exist.")

    if path.suffix == ".npy":
        if options["mode"] != CUBICAL:
            raise ParameterError("A .npy field needs --mode cubical.")
        run.add_inputs([path])
        field = np.load(path)
        diagram = cubical_sublevel_diagram(field)
    else:
        layout = load_layout(path)
        run.add_inputs([path])
        if options["class_id"] is None:
            points = layout.stacked()[0]
        elif 0 <= options["class_id"] < layout.n_classes:
            points = layout.points_of(options["class_id"])
        else:
            raise ParameterError(
                f"--class {options['class_id']} is not one of "
                f"{layout.n_classes} classes."
            )

        if len(points) == 0:
            diagram = PersistenceDiagram()
        elif options["mode"] == RIPS:
            spec = FiltrationSpec(RIPS, max(dims), options["max_scale"])
            diagram = rips_diagram(points, spec, layout.diagonal)
        else:
            grid = stamp(layout.shape, points, options["footprint"])
            field, _ = exact_edt(grid)
            diagram = cubical_sublevel_diagram(field)

    diagram = diagram.in_dimensions(dims)
    save_diagram(diagram, options["out"], options["provenance"])
    manifest = run.manifest(dims=list(dims))
    write_manifest(manifest, options["out"])

    if options["landscape_path"]:
        vector = landscape(
            diagram.in_dimension(max(dims)), options["levels"]
        )
        write_landscape(vector, options["landscape_path"])
        write_manifest(manifest, options["landscape_path"])

    if options["svg"]:
        deaths = diagram.deaths
        top = float(deaths.max()) if len(deaths) else 1.0
        thresholds = np.linspace(0.0, top, 200)
        betti_chart(thresholds, betti_curve(diagram, thresholds), options["svg"])
    print_success(f"{len(diagram)} bars written to {options['out']}")


def _features(path):
    if path is None:
        return None
    return np.loadtxt(path, delimiter=",", ndmin=2)


@entry_point.command(name="eval", no_args_is_help=True)
@click.option("--ref", "ref_dir", required=True, help="Reference layout directory")
@click.option("--syn", "syn_dir", required=True, help="Synthetic layout directory")
@click.option("--metrics", default="topofd,mmd,cce,tce", show_default=True,
              help="Comma-separated subset of topofd,mmd,cce,tce,fd")
@click.option("-r", "--report", required=True, help="JSON report to write")
@click.option("--csv", "csv_path", default=None, help="Flat CSV row to write")
@click.option("--svg", default=None, help="Per-class FD chart to write")
@click.option("--levels", type=click.IntRange(min=1),
              default=config.LANDSCAPE_LEVELS, show_default=True)
@click.option("--samples", type=click.IntRange(min=2),
              default=config.LANDSCAPE_SAMPLES, show_default=True)
@click.option("--ridge", type=float, default=config.RIDGE, show_default=True)
@click.option("--sigma", type=float, default=None,
              help="MMD kernel width [median heuristic]")
@click.option("--center", type=click.Choice([CENTER_BARYCENTER, CENTER_SAMPLE]),
              default=CENTER_BARYCENTER, show_default=True)
@click.option("--count-mode", type=click.Choice(["points", "components"]),
              default="points", show_default=True)
@click.option("--max-scale", type=float, default=None)
@click.option("--ref-features", default=None,
              help="CSV of reference feature vectors for fd")
@click.option("--syn-features", default=None,
              help="CSV of synthetic feature vectors for fd")
@common_options
@handle_errors
def eval_command(**options):
    """Compare a synthetic layout set with a reference set."""
    run = Run("eval", options)
    metrics = [m.strip() for m in options["metrics"].split(",") if m.strip()]
    dims = _dims(options, (1,))

    ref_paths = list_layouts(options["ref_dir"])
    syn_paths = list_layouts(options["syn_dir"])
    run.add_inputs(ref_paths + syn_paths)
    ref = [load_layout(p) for p in ref_paths]
    syn = [load_layout(p) for p in syn_paths]

    report = evaluate(
        ref,
        syn,
        metrics,
        levels=options["levels"],
        samples=options["samples"],
        ridge=options["ridge"],
        sigma=options["sigma"],
        include_h0=0 in dims,
        center=options["center"],
        count_mode=options["count_mode"],
        max_scale=options["max_scale"],
        ref_features=_features(options["ref_features"]),
        syn_features=_features(options["syn_features"]),
        threads=options["threads"],
    )
    report.manifest = run.manifest(dims=list(dims))
    write_json(report.to_dict(), options["report"])

    if options["csv_path"]:
        write_metric_csv(report, options["csv_path"])
        write_manifest(report.manifest, options["csv_path"])
    if options["svg"] and report.per_class_fd is not None:
        per_class_fd_chart(report, options["svg"])
    click.echo(metric_table(report))
    print_success(f"Report written to {options['report']}")


def _weights(options, dims):
    return LossWeights.parse(
        options["weights"],
        tau_rule=TAU_FIXED if options.get("tau") is not None else TAU_MEDIAN,
        tau=options.get("tau"),
        footprint=options["footprint"],
        dims=dims,
        p=options["p"],
        symmetric=options["symmetric"],
        subpixel=options["subpixel"],
    )


def loss_options(func):
    for option in reversed([
        click.option("--weights", default="1,1,1", show_default=True,
                     help="lambda_count,lambda_intra,lambda_inter"),
        click.option("--footprint", type=int, default=config.FOOTPRINT,
                     show_default=True),
        click.option("--p", type=float, default=2.0, show_default=True,
                     help="Order of the matching"),
        click.option("--symmetric", is_flag=True,
                     help="Also charge unmatched target points"),
        click.option("--tau", type=float, default=None,
                     help="Fixed binarisation threshold [median]"),
        click.option("--subpixel/--exact-edt", default=True, show_default=True,
                     help="Let footprints follow off-grid centres so the loss "
                          "is continuous in the positions; foreground pixels "
                          "then score up to about 0.71 instead of 0"),
    ]):
        func = option(func)
    return func


@entry_point.command(no_args_is_help=True)
@click.option("-c", "--candidate", required=True, help="Candidate layout CSV")
@click.option("-t", "--target", required=True, help="Target layout CSV")
@click.option("-r", "--report", default=None,
              help="JSON breakdown to write [stdout]")
@loss_options
@common_options
@handle_errors
def loss(**options):
    """Topological loss breakdown of a candidate against a target.

    By default the distance fields follow off-grid cell centres, so they
    differ from the exact transform of the rasterised footprints by less
    than one pixel; --exact-edt scores the exact transform instead.
    """
    run = Run("loss", options)
    dims = _dims(options, config.LOSS_DIMS)
    candidate = load_layout(options["candidate"])
    target = load_layout(options["target"])
    run.add_inputs([options["candidate"], options["target"]])

    breakdown, _ = evaluate_loss(
        candidate, target, _weights(options, dims), gradient=False
    )
    data = breakdown.to_dict()
    data["schema"] = config.SCHEMA_VERSION
    data["manifest"] = run.manifest(dims=list(dims)).to_dict()

    if options["report"]:
        write_json(data, options["report"])
        click.echo(loss_table(breakdown))
    else:
        click.echo(json.dumps(clean(data), indent=4))


@entry_point.command(no_args_is_help=True)
@click.option("--init", "init_path", required=True, help="Initial layout CSV")
@click.option("-t", "--target", required=True, help="Target layout CSV")
@click.option("--steps", type=click.IntRange(min=1),
              default=config.OPTIMIZER_STEPS, show_default=True)
@click.option("--lr", type=float, default=config.OPTIMIZER_LR,
              show_default=True, help="Step size in pixels")
@click.option("--trace", "trace_path", required=True, help="Trace CSV to write")
@click.option("-o", "--out", default=None, help="Optimised layout CSV")
@loss_options
@common_options
@handle_errors
def optimize(**options):
    """Gradient descent of a layout towards a target's topology."""
    run = Run("optimize", options)
    dims = _dims(options, config.LOSS_DIMS)
    init = load_layout(options["init_path"])
    target = load_layout(options["target"])
    run.add_inputs([options["init_path"], options["target"]])

    cfg = OptimizerConfig(
        steps=options["steps"],
        lr=options["lr"],
        weights=_weights(options, dims),
    )
    result = optimize_layout(init, target, cfg)
    write_rows(TRACE_HEADER, result.trace, options["trace_path"])
    manifest = run.manifest(
        dims=list(dims), diverged=result.diverged, steps_run=result.steps_run
    )
    write_manifest(manifest, options["trace_path"])

    if options["out"]:
        save_layout(result.layout, options["out"])
        write_manifest(manifest, options["out"])
    if result.diverged:
        print_info("Stopped early: the loss diverged.")
    print_success(
        f"L_intra + L_inter: {result.initial:.6g} -> {result.final:.6g}"
    )


def _parse_rings(text):
    rings = []
    for chunk in filter(None, (c.strip() for c in (text or "").split(";"))):
        fields = chunk.split(":")
        if len(fields) != 5:
            raise ParameterError(
                f"Ring {chunk!r} must read class:cx:cy:radius:m."
            )
        try:
            rings.append(RingSpec(
                int(fields[0]), float(fields[1]), float(fields[2]),
                float(fields[3]), int(fields[4]),
            ))
        except ValueError as error:
            raise ParameterError(f"Cannot parse ring {chunk!r}.") from error
    return tuple(rings)


def _write_set(layouts, directory, prefix):
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for index, layout in enumerate(layouts):
        name = sanitize_filename(f"{prefix}_{index:03d}.csv",
                                 replacement_text="_")
        save_layout(layout, directory / name)
        written.append(directory / name)
    return written


@entry_point.command(no_args_is_help=True)
@click.option("--process",
              type=click.Choice([POISSON, MATERN, RING_SCENE, SCENARIO]),
              required=True)
@click.option("-o", "--out", required=True, help="Output directory")
@click.option("-n", "--layouts", type=click.IntRange(min=1), default=1,
              show_default=True)
@click.option("--prefix", default="layout", show_default=True)
@click.option("--classes", default="0", show_default=True,
              help="Comma-separated class names")
@click.option("--width", type=click.IntRange(min=1), default=256,
              show_default=True)
@click.option("--height", type=click.IntRange(min=1), default=256,
              show_default=True)
@click.option("--counts", default=None, help="Cells per class, e.g. 100,50")
@click.option("--intensity", default=None, help="Cells per pixel per class")
@click.option("--min-separation", type=float, default=0.0, show_default=True)
@click.option("--parent-intensity", type=float, default=1e-4,
              show_default=True)
@click.option("--cluster-radius", type=float, default=20.0, show_default=True)
@click.option("--mean-offspring", type=float, default=10.0, show_default=True)
@click.option("--rings", default=None,
              help="class:cx:cy:radius:m entries separated by ';'")
@click.option("--jitter", type=float, default=0.0, show_default=True)
@click.option("--phase", type=float, default=0.0, show_default=True)
@common_options
@handle_errors
def gen(**options):
    """Generate seeded synthetic layouts."""
    run = Run("gen", options)
    out = Path(options["out"])

    if options["process"] == SCENARIO:
        scenario = topology_scenario(
            options["seed"], options["layouts"], options["width"],
            options["height"],
        )
        for name, layouts in scenario.items():
            _write_set(layouts, out / name, options["prefix"])
        write_json(run.manifest().to_dict(), out / "gen.manifest.json")
        print_success(f"Scenario sets written to {out}")
        return

    base = dict(
        kind=options["process"],
        width=options["width"],
        height=options["height"],
        class_names=tuple(c.strip() for c in options["classes"].split(",")),
        counts=(tuple(parse_ints(options["counts"], "counts"))
                if options["counts"] else None),
        intensity=(tuple(parse_floats(options["intensity"], "intensity"))
                   if options["intensity"] else None),
        min_separation=options["min_separation"],
        parent_intensity=options["parent_intensity"],
        cluster_radius=options["cluster_radius"],
        mean_offspring=options["mean_offspring"],
        rings=_parse_rings(options["rings"]),
        jitter=options["jitter"],
        phase=options["phase"],
    )
    seeds = [
        int(s.generate_state(1, np.uint64)[0])
        for s in spawn_seeds(options["seed"], options["layouts"])
    ]
    specs = [PointProcessSpec(seed=seed, **base) for seed in seeds]
    layouts = ordered_map(generate, specs, options["threads"])

    _write_set(layouts, out, options["prefix"])
    manifest = run.manifest()
    manifest.seeds = [options["seed"]] + seeds
    write_json(manifest.to_dict(), out / "gen.manifest.json")
    print_success(f"{len(layouts)} layouts written to {out}")


@entry_point.command(no_args_is_help=True)
@click.option("--ref", "ref_dir", required=True, help="Real layout directory")
@click.option("--syn", "syn_dir", required=True, help="Synthetic layout directory")
@click.option("--radii", default=",".join(f"{r:g}" for r in config.KSTATS_RADII),
              show_default=True)
@click.option("--alpha", type=float, default=config.KSTATS_ALPHA,
              show_default=True)
@click.option("--border", is_flag=True, help="Border-corrected estimator")
@click.option("-r", "--report", required=True, help="JSON report to write")
@common_options
@handle_errors
def kstats(**options):
    """Paired t-tests on Ripley K of real and synthetic layouts."""
    run = Run("kstats", options)
    ref_paths = list_layouts(options["ref_dir"])
    syn_paths = list_layouts(options["syn_dir"])
    run.add_inputs(ref_paths + syn_paths)

    report = k_discrepancy_test(
        load_layout_dir(options["ref_dir"]),
        load_layout_dir(options["syn_dir"]),
        parse_floats(options["radii"], "radii"),
        options["alpha"],
        options["border"],
    )
    data = report.to_dict()
    data["manifest"] = run.manifest().to_dict()
    write_json(data, options["report"])

    click.echo(k_table(report))
    intra_passed, intra_total = report.intra_passes
    cross_passed, cross_total = report.cross_passes
    print_success(
        f"intra {intra_passed}/{intra_total}, cross {cross_passed}/{cross_total}"
    )


if __name__ == "__main__":
    entry_point()
