from .closedformadapter import ClosedFormAdapter
from .estimatedadapter import EstimatedAdapter
from .zeroadapter import ZeroAdapter

__all__ = ("ZeroAdapter", "ClosedFormAdapter", "EstimatedAdapter")
