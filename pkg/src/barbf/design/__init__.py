"""Initial designs."""

from barbf.design.lhd import Design, export_design, maximin_lhd, snap_to_grid

__all__ = ["Design", "export_design", "maximin_lhd", "snap_to_grid"]
