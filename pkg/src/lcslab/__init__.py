"""Numerical verification workbench for locally conformally symplectic,
contact and locally conformally Kahler geometry.

Everything is represented over an ambient R^N: manifolds as constraint zero
sets, differential forms with closed-form coefficient expressions, group
actions as expression flows.  The library verifies structural identities at
sampled points instead of proving them, and every exact computation has an
independent numerical oracle sitting next to it in the test suite.
"""

__version__ = "0.1.0"

from .checks import run_scenario, run_suite
from .errors import LcslabError
from .gallery import expected_checks, load_example, registry_names
from .report import Report, render_csv, render_json, render_text
from .scenario import export_scenario, load_scenario

__all__ = [
    "LcslabError", "Report", "__version__", "expected_checks",
    "export_scenario", "load_example", "load_scenario", "registry_names",
    "render_csv", "render_json", "render_text", "run_scenario", "run_suite",
]
