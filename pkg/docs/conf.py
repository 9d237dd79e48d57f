# Sphinx configuration for the DiscoJam documentation.

import os
import sys

sys.path.insert(0, os.path.abspath(".."))

from DiscoJamEngine import __version__  # noqa: E402

project = "DiscoJam"
copyright = "2026, DiscoJam developers"
author = "DiscoJam developers"
release = __version__
version = ".".join(__version__.split(".")[:2])

extensions = [
    "recommonmark",
    "sphinx.ext.autodoc",
    "sphinx.ext.autosectionlabel",
    "sphinx.ext.viewcode",
    "sphinx.ext.napoleon",
    "sphinx.ext.intersphinx",
]

templates_path = ["_templates"]
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

html_theme = "sphinx_rtd_theme"
html_static_path = ["_static"]

# docstrings are numpy style throughout
napoleon_google_docstring = False
napoleon_numpy_docstring = True
napoleon_use_rtype = False

# the user guide and the API pages share section titles
autosectionlabel_prefix_document = True

autodoc_default_options = {"show-inheritance": True}
autodoc_member_order = "bysource"

default_role = "any"

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/", None),
}
