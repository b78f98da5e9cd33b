"""Figure rendering for label-audit CSV outputs."""

from .render_cdf import CdfSpec, render_cdf
from .render_scatter import ScatterSpec, render_scatter
from .render_tradeoff import TradeoffSpec, render_tradeoff

__version__ = "0.1.0"
