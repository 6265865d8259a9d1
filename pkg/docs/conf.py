# Configuration file for the Sphinx documentation builder.
#
# https://www.sphinx-doc.org/en/master/usage/configuration.html

# -- Project information -----------------------------------------------------

project = 'pitdn'
copyright = '2026, pitdn developers'
author = 'pitdn developers'

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.viewcode",
    "sphinx.ext.mathjax",
    "myst_parser",              # markdown pages (index, formats)
    "sphinx.ext.napoleon",      # "Parameters:" / "Returns:" / "Raises:" docstring sections
    "sphinx_autodoc_typehints",
]
autosummary_generate = True
autosummary_imported_members = True

autodoc_default_options = {
    'special-members': '__init__',
}

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']


# -- Options for HTML output -------------------------------------------------

html_theme = 'furo'
