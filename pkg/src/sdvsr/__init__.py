"""sdvsr: structure-detail recurrent video super-resolution on numpy."""

__version__ = "0.1.0"
