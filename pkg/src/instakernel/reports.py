"""Reduction reports: one record per compression, plus CSV and PNG renderers.

The CLI emits a ReductionReport for every compress run; the ``report``
subcommand batches several instances and renders the records as a delimited
table next to a bar chart comparing original, reduced, and proven-bound bit
sizes per instance.
"""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass
from typing import Sequence

from .budget import InputError

VERDICTS = ("Reduced", "Infeasible", "BudgetExceeded")
VERIFICATIONS = ("Verified", "Skipped", "Failed")


@dataclass(frozen=True)
class ReductionReport:
    """Outcome record of one reduction run."""

    instance: str
    kind: str
    original_bits: int
    reduced_bits: int
    theoretical_bound_bits: int
    elapsed_ms: int
    verdict: str
    verification: str

    def __post_init__(self) -> None:
        if self.verdict not in VERDICTS:
            raise InputError(f"verdict must be one of {VERDICTS}")
        if self.verification not in VERIFICATIONS:
            raise InputError(f"verification must be one of {VERIFICATIONS}")

    def to_json_dict(self) -> dict:
        # bit counts stay well under 2^53 in practice, but the decimal-string
        # convention is uniform across the package
        out = asdict(self)
        for key in ("original_bits", "reduced_bits", "theoretical_bound_bits", "elapsed_ms"):
            out[key] = str(out[key])
        return out


CSV_FIELDS = (
    "instance",
    "kind",
    "original_bits",
    "reduced_bits",
    "theoretical_bound_bits",
    "elapsed_ms",
    "verdict",
    "verification",
)


def write_report_csv(reports: Sequence[ReductionReport], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for rep in reports:
            writer.writerow(asdict(rep))


def render_report_png(reports: Sequence[ReductionReport], path: str) -> None:
    """Grouped bar chart of bit sizes (log scale; bounds dwarf actuals)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if not reports:
        raise InputError("nothing to plot")
    labels = [rep.instance for rep in reports]
    xs = range(len(reports))
    width = 0.27
    fig, ax = plt.subplots(figsize=(max(6.0, 1.2 * len(reports)), 4.5))
    ax.bar(
        [x - width for x in xs],
        [max(rep.original_bits, 1) for rep in reports],
        width,
        label="original bits",
    )
    ax.bar(
        list(xs),
        [max(rep.reduced_bits, 1) for rep in reports],
        width,
        label="reduced bits",
    )
    ax.bar(
        [x + width for x in xs],
        [max(rep.theoretical_bound_bits, 1) for rep in reports],
        width,
        label="proven bound",
    )
    ax.set_yscale("log")
    ax.set_ylabel("bits (log scale)")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.legend()
    ax.set_title("instance compression: size before / after / proven cap")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
