from .adapter import StatisticsAdapter
from .benchmark import Benchmark, parameter_required_benchmark

__all__ = ("StatisticsAdapter", "Benchmark", "parameter_required_benchmark")
