"""
Utility helpers shared by every package

- seeding: derived numpy random streams
- optimize: golden-section search
- tables: text tables and pandas CSV output
- output: run directories and JSON summaries
"""

from .seeding import derive_rng, derive_seed_sequence, derive_int_seed
from .optimize import golden_section_maximize, golden_section_maximize_log
from .tables import format_table, write_csv
from .output import make_run_dir, write_json

__all__ = [
    'derive_rng', 'derive_seed_sequence', 'derive_int_seed',
    'golden_section_maximize', 'golden_section_maximize_log',
    'format_table', 'write_csv',
    'make_run_dir', 'write_json',
]
