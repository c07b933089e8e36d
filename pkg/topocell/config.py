# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

import os
from pathlib import Path

HOME_DIR = f"{Path.home()}/.topocell/"
LOG_DIR = f"{HOME_DIR}logs"

DEBUG = os.environ.get("TOPOCELL_DEBUG", "0") == "1"

# Report layout
SCHEMA_VERSION = 1

# Cell footprint (pixels per side) and its area
FOOTPRINT = 3
DELTA = FOOTPRINT * FOOTPRINT
CONNECTIVITY = 8

# Persistence
LOSS_DIMS = (1,)
DEGENERATE_PERSISTENCE = 1e-9

# Landscapes and barycenters
LANDSCAPE_LEVELS = 5
LANDSCAPE_SAMPLES = 100
BARYCENTER_MAX_ITER = 50
BARYCENTER_TOL = 1e-7

# Gaussian summaries
RIDGE = 1e-6

# Optimizer
OPTIMIZER_STEPS = 200
OPTIMIZER_LR = 0.05
DIVERGENCE_FACTOR = 10.0
DIVERGENCE_PATIENCE = 10

# Spatial statistics
KSTATS_RADII = (15.0, 30.0, 45.0, 60.0, 75.0, 90.0)
KSTATS_ALPHA = 0.05

# Generation
GENERATION_RETRIES = 1000

Path(LOG_DIR).mkdir(parents=True, exist_ok=True)
