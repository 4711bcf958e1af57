"""Digital nets and sequences over Z2, with periodic discrepancy measures."""

__version__ = "0.1.0"
