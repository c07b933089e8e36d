# Configuration file for the Sphinx documentation builder.

import os
import sys
sys.path.insert(0, os.path.abspath('../../'))

from topocell import __version__  # noqa: E402

# -- Project information -----------------------------------------------------

project = 'topocell'
copyright = 'TopoCell developers'
author = 'TopoCell developers'
release = __version__

# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.githubpages',
]

templates_path = ['_templates']
exclude_patterns = []

# -- Options for HTML output -------------------------------------------------

html_theme = 'sphinx_rtd_theme'
master_doc = 'index'
