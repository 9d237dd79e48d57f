from .activejammer import ActiveJammerBenchmark
from .ajp import AntiJammingBenchmark, EstimatedAntiJammingBenchmark
from .jammedzf import JammedZfBenchmark
from .nojam import NoJammingBenchmark

__all__ = (
    "NoJammingBenchmark",
    "JammedZfBenchmark",
    "AntiJammingBenchmark",
    "EstimatedAntiJammingBenchmark",
    "ActiveJammerBenchmark",
    "DEFAULT_BENCHMARKS",
)

DEFAULT_BENCHMARKS = (
    NoJammingBenchmark,
    JammedZfBenchmark,
    AntiJammingBenchmark,
    EstimatedAntiJammingBenchmark,
    ActiveJammerBenchmark,
)
