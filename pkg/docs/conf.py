# -*- coding: utf-8 -*-
#
# EMP Simulator documentation build configuration file.
#
# This file is execfile()d with the current directory set to its containing
# dir.

import sys, os

# If extensions (or modules to document with autodoc) are in another directory,
# add these directories to sys.path here.
sys.path.insert(0, os.path.abspath('../'))

# -- General configuration -----------------------------------------------------

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.intersphinx',
              'sphinx.ext.todo', 'sphinx.ext.viewcode']

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

project = u'EMP Simulator'
copyright = u'2026, The EMP Simulator Developers'

version = '0.1'
release = '0.1'

exclude_patterns = ['_build']

pygments_style = 'sphinx'

# -- Options for HTML output ---------------------------------------------------

html_theme = 'default'

html_static_path = ['_static']

htmlhelp_basename = 'EmpSimulatorDoc'

# -- Options for LaTeX output --------------------------------------------------

latex_documents = [
  ('index', 'EmpSimulator.tex', u'EMP Simulator Documentation',
   u'The EMP Simulator Developers', 'manual'),
]

# -- Options for manual page output --------------------------------------------

man_pages = [
    ('index', 'empsim', u'EMP Simulator Documentation',
     [u'The EMP Simulator Developers'], 1)
]

intersphinx_mapping = {
    'python': ('https://docs.python.org/3/', None),
    'django': (
        'https://docs.djangoproject.com/en/stable/',
        'https://docs.djangoproject.com/en/stable/_objects/'
    ),
    'numpy': ('https://numpy.org/doc/stable/', None),
}

# Autodoc needs configured settings to import the apps
os.environ.setdefault("DJANGO_SETTINGS_MODULE", "empsim.project.settings")
import django
django.setup()
