# Sphinx configuration for the chainlock documentation.

import os
import sys

sys.path.insert(0, os.path.abspath('..'))

import chainlock

project = 'chainlock'
copyright = "2021, dominic rufa"
author = 'dominic rufa'
version = chainlock.__version__
release = version

extensions = [
    'sphinx.ext.autosummary',
    'sphinx.ext.autodoc',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon',
]

autosummary_generate = True
# docstrings use the numpy "parameters / returns" layout
napoleon_google_docstring = False
napoleon_use_param = False
napoleon_use_ivar = True

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
pygments_style = 'default'

html_theme = 'sphinx_rtd_theme'
html_static_path = ['_static']
htmlhelp_basename = 'chainlockdoc'
