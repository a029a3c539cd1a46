"""Publication-style plots from the simulator's CSV output files."""

from .plots import PlotSpec, SchemaError, plot_iv, plot_profiles

__version__ = "0.1.0"

__all__ = ["PlotSpec", "SchemaError", "plot_iv", "plot_profiles"]
