import csv
import io
import logging
from pathlib import Path
from typing import Iterable, Optional, Sequence, TextIO, Union

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .channel import ChannelSet  # noqa: E402
from .harness import ExperimentResult  # noqa: E402

__all__ = (
    "RESULT_HEADER",
    "MOMENT_HEADER",
    "TRACE_HEADER",
    "CHANNEL_HEADER",
    "format_results",
    "write_results",
    "write_moments",
    "write_trace",
    "write_channels",
    "plot_results",
)

log = logging.getLogger(__name__)

RESULT_HEADER = ("sweep", "benchmark", "mode", "case", "rate_per_lu", "stderr", "trials")
MOMENT_HEADER = ("k", "n", "mean_re", "mean_im", "var_emp", "var_closed", "ratio")
TRACE_HEADER = ("frame", "s", "k", "feedback_power", "estimate")
CHANNEL_HEADER = ("matrix", "row", "col", "re", "im")

PathLike = Union[str, Path]


def _num(value: float) -> str:
    return f"{value:.10g}"


def _write(path: PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as stream:
        _emit(stream, header, rows)
    log.info("wrote %s", path)


def _emit(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_num(v) if isinstance(v, float) else v for v in row])


def _result_rows(result: ExperimentResult):
    for row in result:
        yield (
            row.sweep,
            row.benchmark,
            row.mode,
            row.case,
            f"{row.rate_per_lu:.8f}",
            f"{row.stderr:.8f}",
            row.trials,
        )


def format_results(result: ExperimentResult) -> str:
    """The results CSV as a string."""
    stream = io.StringIO()
    _emit(stream, RESULT_HEADER, _result_rows(result))
    return stream.getvalue()


def write_results(result: ExperimentResult, path: Optional[PathLike] = None) -> str:
    """
    Write the results CSV with header ``sweep,benchmark,mode,case,rate_per_lu,stderr,trials``.

    Numbers are formatted with fixed precision so identical runs give identical bytes.
    Returns the CSV text; ``path=None`` only returns it.
    """
    text = format_results(result)
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as stream:
            stream.write(text)
        log.info("wrote %d rows to %s", len(result), path)
    return text


def write_moments(rows, path: PathLike) -> None:
    """Write `~DiscoJamEngine.stats.moment_report_rows` output."""
    _write(path, MOMENT_HEADER, rows)


def write_trace(rows, path: PathLike) -> None:
    """Write `~DiscoJamEngine.harness.feedback_trace` output."""
    _write(path, TRACE_HEADER, rows)


def _matrix_rows(name: str, matrix):
    for row, col in np.ndindex(*matrix.shape):
        value = complex(matrix[row, col])
        yield (name, row, col, value.real, value.imag)


def write_channels(channels: ChannelSet, path: PathLike) -> None:
    """Dump ``G``, ``H_I`` and ``H_d`` as ``matrix,row,col,re,im`` rows."""

    def rows():
        yield from _matrix_rows("G", channels.G)
        yield from _matrix_rows("H_I", channels.H_I)
        yield from _matrix_rows("H_d", channels.H_d)

    _write(path, CHANNEL_HEADER, rows())


def plot_results(result: ExperimentResult, path: PathLike) -> None:
    """
    Draw one line per benchmark against the sweep variable and save it as SVG.

    The SVG carries no timestamp and uses a fixed hash salt, so reruns produce the
    same file.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context({"svg.hashsalt": "discojam", "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.8))
        for benchmark in result.benchmarks:
            x, y, err = result.series(benchmark)
            ax.errorbar(x, y, yerr=err, marker="o", capsize=3, label=benchmark)
        ax.set_xlabel(result.sweep_name)
        ax.set_ylabel("rate per LU (bit/s/Hz)")
        ax.set_title(f"{result.spec.mode.value}, {result.spec.case}")
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    log.info("wrote plot %s", path)
