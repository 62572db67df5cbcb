"""
Configures Django so that the test suites also run under pytest.
"""
import os

import django


def pytest_configure(config):
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "empsim.project.settings")
    django.setup()
