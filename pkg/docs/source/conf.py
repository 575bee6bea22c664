import os
import sys

import sphinx_rtd_theme

sys.path.insert(0, os.path.abspath('../..'))

from solharm import __version__  # noqa: E402

# -- Project information -----------------------------------------------------

project = 'solharm'
copyright = '2026, solharm developers'
author = 'solharm developers'

# The full version, including alpha/beta/rc tags
release = __version__

# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.napoleon',
    'sphinx.ext.autodoc',
    'sphinx.ext.mathjax',
    'sphinx_rtd_theme',
]

templates_path = ['_templates']

exclude_patterns = []

# -- Options for HTML output -------------------------------------------------

html_theme = 'sphinx_rtd_theme'

html_static_path = ['_static']
