# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

"""
Seeded synthetic layouts: Poisson and Matern cluster processes, scripted
ring scenes, and the ring scenario used to sanity-check TopoFD.

All randomness comes from a counter-based Philox generator keyed by a
SeedSequence; every class and every layout of a batch gets its own spawned
child sequence, so results do not depend on how the work is scheduled.
"""

import math
from typing import Dict, List

import numpy as np

from topocell import config
from topocell.core.struct.layoutobject import CellLayout
from topocell.core.struct.processobject import (
    MATERN,
    POISSON,
    RING_SCENE,
    PointProcessSpec,
    RingSpec,
)
from topocell.errors import GenerationError
from topocell.utils.logger import get_logger

log = get_logger(__name__)

# half-open canvas: coordinates stay strictly below width and height
EDGE = 1e-6
# hexagonal packing density of discs of diameter min_separation
PACKING = math.sqrt(3.0) / 2.0


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def spawn_seeds(seed: int, count: int) -> List[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(count)


def _clip(points: np.ndarray, width: int, height: int) -> np.ndarray:
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    points[:, 0] = np.clip(points[:, 0], 0.0, width - EDGE)
    points[:, 1] = np.clip(points[:, 1], 0.0, height - EDGE)
    return points


def _uniform(rng, count, width, height):
    return np.column_stack([
        rng.uniform(0.0, width, count), rng.uniform(0.0, height, count)
    ])


def _uniform_disk(rng, centers, radius):
    """
    Uniform points in discs: the squared radius is uniform.
    """
    count = len(centers)
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, count))
    theta = rng.uniform(0.0, 2.0 * np.pi, count)
    return centers + np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def _separated(rng, counts, spec: PointProcessSpec):
    """
    Sequential rejection sampling of points at least ``min_separation``
    apart, across every class.
    """
    area = spec.width * spec.height
    total = int(sum(counts))
    if total * PACKING * spec.min_separation ** 2 > area:
        raise GenerationError(
            f"{total} cells {spec.min_separation} px apart do not fit on a "
            f"{spec.width}x{spec.height} canvas."
        )

    placed = np.zeros((0, 2))
    per_class = []
    squared = spec.min_separation ** 2
    for count in counts:
        accepted = []
        for _ in range(count):
            for _ in range(config.GENERATION_RETRIES):
                candidate = _uniform(rng, 1, spec.width, spec.height)
                if not len(placed) or np.min(
                    np.sum((placed - candidate) ** 2, axis=1)
                ) >= squared:
                    break
            else:
                raise GenerationError(
                    f"Could not place a cell after {config.GENERATION_RETRIES} "
                    "attempts; lower the count or min_separation."
                )
            placed = np.vstack([placed, candidate])
            accepted.append(candidate[0])
        per_class.append(np.array(accepted).reshape(-1, 2))
    return per_class


def poisson(spec: PointProcessSpec) -> CellLayout:
    """
    Uniform cells, either exactly ``counts`` per class or a Poisson number
    with mean ``intensity * area``.
    """
    rng = make_rng(spec.seed)
    area = spec.width * spec.height
    if spec.counts is not None:
        counts = [int(c) for c in spec.counts]
    else:
        counts = [int(rng.poisson(rate * area)) for rate in spec.intensity]

    if spec.min_separation > 0:
        points = _separated(rng, counts, spec)
    else:
        children = [make_rng(s) for s in spawn_seeds(spec.seed, len(counts))]
        points = [
            _uniform(child, count, spec.width, spec.height)
            for child, count in zip(children, counts)
        ]
    points = [_clip(p, spec.width, spec.height) for p in points]
    return CellLayout(spec.width, spec.height, spec.class_names, points)


def _matern_class(rng, count, spec: PointProcessSpec):
    radius = spec.cluster_radius
    width, height = spec.width + 2 * radius, spec.height + 2 * radius
    parents = np.zeros((0, 2))
    for _ in range(config.GENERATION_RETRIES):
        n_parents = rng.poisson(spec.parent_intensity * width * height)
        parents = _uniform(rng, n_parents, width, height) - radius
        if count is None or count == 0 or len(parents):
            break
    else:
        raise GenerationError("The Matern process produced no parent.")

    if count is None:
        offspring = rng.poisson(spec.mean_offspring, len(parents))
        origin = np.repeat(np.arange(len(parents)), offspring)
        children = _uniform_disk(rng, parents[origin], radius)
        inside = (
            (children[:, 0] >= 0) & (children[:, 0] < spec.width)
            & (children[:, 1] >= 0) & (children[:, 1] < spec.height)
        )
        return children[inside], parents

    children = []
    for _ in range(count):
        for _ in range(config.GENERATION_RETRIES):
            parent = parents[rng.integers(len(parents))]
            child = _uniform_disk(rng, parent[None, :], radius)[0]
            if 0 <= child[0] < spec.width and 0 <= child[1] < spec.height:
                break
        else:
            raise GenerationError(
                "Matern offspring keep falling outside the canvas."
            )
        children.append(child)
    return np.array(children).reshape(-1, 2), parents


def matern_cluster(spec: PointProcessSpec):
    """
    Matern cluster process: Poisson parents on the canvas grown by the
    cluster radius, each with offspring uniform in the disc around it. With
    ``counts`` every class gets exactly that many offspring, each attached
    to a uniformly chosen parent.

    :return: (CellLayout, parents per class)
    """
    children_seeds = spawn_seeds(spec.seed, len(spec.class_names))
    points, parents = [], []
    for class_id, child_seed in enumerate(children_seeds):
        count = None if spec.counts is None else int(spec.counts[class_id])
        class_points, class_parents = _matern_class(
            make_rng(child_seed), count, spec
        )
        points.append(_clip(class_points, spec.width, spec.height))
        parents.append(class_parents)
    layout = CellLayout(spec.width, spec.height, spec.class_names, points)
    return layout, parents


def ring_points(ring: RingSpec, jitter: float = 0.0, phase: float = 0.0,
                rng: np.random.Generator = None) -> np.ndarray:
    """
    ``m`` points at angles ``2 pi k / m + phase`` on the ring, optionally
    moved by isotropic Gaussian jitter.
    """
    angles = 2.0 * np.pi * np.arange(ring.m) / ring.m + phase
    points = np.column_stack([
        ring.cx + ring.radius * np.cos(angles),
        ring.cy + ring.radius * np.sin(angles),
    ])
    if jitter > 0:
        points = points + rng.normal(0.0, jitter, points.shape)
    return points


def ring_scene(spec: PointProcessSpec) -> CellLayout:
    rng = make_rng(spec.seed)
    points = [[] for _ in spec.class_names]
    for ring in spec.rings:
        points[ring.class_id].append(
            ring_points(ring, spec.jitter, spec.phase, rng)
        )
    points = [
        _clip(np.concatenate(p) if p else np.zeros((0, 2)),
              spec.width, spec.height)
        for p in points
    ]
    return CellLayout(spec.width, spec.height, spec.class_names, points)


def generate(spec: PointProcessSpec) -> CellLayout:
    """
    Realise a point-process spec into a layout, bit-identically for a given
    seed.

    :raises GenerationError: the spec cannot be realised
    """
    if spec.kind == POISSON:
        layout = poisson(spec)
    elif spec.kind == MATERN:
        layout = matern_cluster(spec)[0]
    elif spec.kind == RING_SCENE:
        layout = ring_scene(spec)
    log.debug(f"Generated {spec.kind} layout, seed {spec.seed}: {layout}")
    return layout


def generate_batch(spec: PointProcessSpec, count: int) -> List[CellLayout]:
    """
    ``count`` layouts whose seeds are spawned from ``spec.seed``.
    """
    seeds = spawn_seeds(spec.seed, count)
    return [
        generate(_with_seed(spec, int(s.generate_state(1, np.uint64)[0])))
        for s in seeds
    ]


def _with_seed(spec: PointProcessSpec, seed: int) -> PointProcessSpec:
    values = {name: getattr(spec, name) for name in spec.__dataclass_fields__}
    values["seed"] = seed
    return PointProcessSpec(**values)


SCENARIO_CLASSES = ("c0", "c1")
# (reference ring size, sizes of the two rings it splits into)
SCENARIO_RINGS = ((12, (6, 6)), (12, (11, 11)))


def _scenario_layout(rng, rings, width, height, jitter):
    points = [[] for _ in SCENARIO_CLASSES]
    for class_id, cx, cy, radius, m in rings:
        ring = RingSpec(class_id, cx, cy, radius, m)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        points[class_id].append(ring_points(ring, jitter, phase, rng))
    points = [_clip(np.concatenate(p), width, height) for p in points]
    return CellLayout(width, height, SCENARIO_CLASSES, points)


def topology_scenario(
    seed: int,
    layouts: int = 8,
    width: int = 256,
    height: int = 256,
    radius: float = 40.0,
    jitter: float = 2.0,
) -> Dict[str, List[CellLayout]]:
    """
    Three collections of two-class ring layouts.

    ``ref`` holds one ring per class; ``set1`` the same rings with stronger
    jitter and identical counts; ``set2`` splits every ring into two small
    rings, the second class gaining ten cells, so that the total count error
    against ``ref`` is exactly 10 for every pair.

    :return: {"ref": [...], "set1": [...], "set2": [...]}
    """
    rngs = [make_rng(s) for s in spawn_seeds(seed, 3)]
    scenario = {"ref": [], "set1": [], "set2": []}
    column = width / 4.0
    middle = height / 2.0
    small = radius / 2.0

    for _ in range(layouts):
        centers = [
            (column + rngs[0].uniform(-4, 4), middle + rngs[0].uniform(-4, 4)),
            (3 * column + rngs[0].uniform(-4, 4),
             middle + rngs[0].uniform(-4, 4)),
        ]
        single = [
            (class_id, cx, cy, radius, SCENARIO_RINGS[class_id][0])
            for class_id, (cx, cy) in enumerate(centers)
        ]
        split = [
            (class_id, cx, cy + sign * 1.2 * radius, small, size)
            for class_id, (cx, cy) in enumerate(centers)
            for sign, size in zip((-1, 1), SCENARIO_RINGS[class_id][1])
        ]
        scenario["ref"].append(
            _scenario_layout(rngs[0], single, width, height, jitter / 2.0)
        )
        scenario["set1"].append(
            _scenario_layout(rngs[1], single, width, height, jitter)
        )
        scenario["set2"].append(
            _scenario_layout(rngs[2], split, width, height, jitter / 2.0)
        )
    return scenario

