# Configuration file for the Sphinx documentation builder.
# https://www.sphinx-doc.org/en/master/usage/configuration.html

# -- Version setup -----------------------------------------------------------
try:
    from barbf import __version__ as project_version
except Exception:
    project_version = '0.1.0'

import sphinx_rtd_theme  # noqa: F401

# -- Project information -----------------------------------------------------

project = 'barbf'
copyright = '2026, barbf developers'
author = 'barbf developers'

release = project_version
version = '.'.join(project_version.split('.')[:2])

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx_rtd_theme",
    "sphinx.ext.autosectionlabel",
    "sphinx.ext.autodoc",
    "sphinx.ext.viewcode",
    "sphinx.ext.napoleon",
]

autosectionlabel_prefix_document = True
exclude_patterns = []

# numpydoc-style docstrings throughout the package
napoleon_google_docstring = False
napoleon_numpy_docstring = True
napoleon_include_init_with_doc = False
napoleon_include_private_with_doc = False

autodoc_member_order = 'bysource'

# -- Options for HTML output -------------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_theme_options = {
    'prev_next_buttons_location': 'bottom',
    'collapse_navigation': True,
    'sticky_navigation': True,
    'navigation_depth': 3,
}

source_suffix = '.rst'
master_doc = 'index'
