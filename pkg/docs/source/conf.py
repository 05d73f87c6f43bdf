# Sphinx configuration for the magsteklov docs.

import datetime
import os
import sys

sys.path.insert(0, os.path.abspath("../.."))

import magsteklov  # noqa: E402

# -- Project -----------------------------------------------------------------

project = "magsteklov"
author = "magsteklov contributors"
copyright = f"{datetime.datetime.now().year}, {author}"

version = ".".join(magsteklov.__VERSION__.split(".")[:2])
release = magsteklov.__VERSION__

# -- General -----------------------------------------------------------------

master_doc = "index"
extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.mathjax",
    "sphinx_autodoc_typehints",
]
autoclass_content = "both"
autodoc_member_order = "bysource"
templates_path = ["_templates"]
exclude_patterns = []

# -- HTML --------------------------------------------------------------------

html_theme = "sphinx_rtd_theme"
html_static_path = ["_static"]
