"""Simulation grids of the published MSE tables and their reference values.

``T1``-``T3`` use 1-dependent MA errors (Gaussian at n=1600, t4 at n=1600,
Gaussian at n=3000); ``T4``/``T5`` use AR(1) errors with the difference
estimator at ``m = 2`` and the Hall-Van Keilegom baseline; ``T6`` runs both on
the same data for a paired comparison; ``T7`` is the ``m = 3`` difference
estimator on ``f1`` only.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from . import noise as noise_mod
from .montecarlo import EstimatorConfig, ExperimentSpec, MseReport, run_experiment
from .signal import simulation_signal

GAMMA1_GRID = (-0.5, -0.4, -0.2, 0.0, 0.2, 0.4, 0.5)
PHI_GRID = (0.1, 0.2, 0.3, 0.4, 0.5)
SMOOTHS = ("f1", "f2", "f3")
TABLE_IDS = ("T1", "T2", "T3", "T4", "T5", "T6", "T7")

# m = 2 is the depth that reproduces the MA tables; m = 1 yields no rho_2 estimate
MA_TABLE_M = 2

_TABLE_NUMBER = {t: i + 1 for i, t in enumerate(TABLE_IDS)}

# (smooth, parameter) -> (MSE rho_1, MSE rho_2), as printed
REFERENCE: dict[str, dict[tuple[str, float], tuple[float, float]]] = {
    "T1": {
        **dict(zip([("f1", g) for g in GAMMA1_GRID], [
            (0.0359, 0.0050), (0.0303, 0.0045), (0.0213, 0.0045), (0.0126, 0.0040),
            (0.0064, 0.0035), (0.0022, 0.0033), (0.0010, 0.0032)])),
        **dict(zip([("f2", g) for g in GAMMA1_GRID], [
            (0.0360, 0.0051), (0.0320, 0.0048), (0.0200, 0.0040), (0.0125, 0.0038),
            (0.0065, 0.0038), (0.0023, 0.0035), (0.0010, 0.0034)])),
        **dict(zip([("f3", g) for g in GAMMA1_GRID], [
            (0.0388, 0.0053), (0.0326, 0.0048), (0.0215, 0.0046), (0.0128, 0.0038),
            (0.0064, 0.0037), (0.0025, 0.0037), (0.0011, 0.0036)])),
    },
    "T2": {
        **dict(zip([("f1", g) for g in GAMMA1_GRID], [
            (0.0126, 0.0034), (0.0108, 0.0028), (0.0069, 0.0024), (0.0047, 0.0019),
            (0.0024, 0.0016), (0.0010, 0.0013), (0.0005, 0.0014)])),
        **dict(zip([("f2", g) for g in GAMMA1_GRID], [
            (0.0127, 0.0037), (0.0102, 0.0028), (0.0066, 0.0022), (0.0045, 0.0018),
            (0.0023, 0.0015), (0.0011, 0.0014), (0.0006, 0.0015)])),
        **dict(zip([("f3", g) for g in GAMMA1_GRID], [
            (0.0128, 0.0031), (0.0102, 0.0030), (0.0078, 0.0024), (0.0049, 0.0021),
            (0.0029, 0.0017), (0.0011, 0.0015), (0.0006, 0.0015)])),
    },
    "T3": {
        **dict(zip([("f1", g) for g in GAMMA1_GRID], [
            (0.0119, 0.0024), (0.0103, 0.0021), (0.0070, 0.0018), (0.0042, 0.0015),
            (0.0021, 0.0013), (0.0008, 0.0012), (0.0004, 0.0012)])),
        **dict(zip([("f2", g) for g in GAMMA1_GRID], [
            (0.0123, 0.0023), (0.0107, 0.0021), (0.0072, 0.0016), (0.0041, 0.0014),
            (0.0021, 0.0013), (0.0008, 0.0012), (0.0004, 0.0012)])),
        **dict(zip([("f3", g) for g in GAMMA1_GRID], [
            (0.0124, 0.0021), (0.0102, 0.0021), (0.0075, 0.0017), (0.0043, 0.0014),
            (0.0023, 0.0014), (0.0009, 0.0013), (0.0004, 0.0013)])),
    },
    "T4": {
        **dict(zip([("f1", p) for p in PHI_GRID], [
            (0.0087, 0.0033), (0.0053, 0.0023), (0.0021, 0.0008), (0.0005, 0.0010),
            (0.0019, 0.0068)])),
        **dict(zip([("f2", p) for p in PHI_GRID], [
            (0.0084, 0.0034), (0.0054, 0.0022), (0.0023, 0.0009), (0.0005, 0.0010),
            (0.0020, 0.0068)])),
        **dict(zip([("f3", p) for p in PHI_GRID], [
            (0.0092, 0.0035), (0.0056, 0.0023), (0.0022, 0.0008), (0.0005, 0.0009),
            (0.0018, 0.0067)])),
    },
    "T5": {
        **dict(zip([("f1", p) for p in PHI_GRID], [
            (0.0233, 0.0097), (0.0190, 0.0093), (0.0144, 0.0078), (0.0126, 0.0083),
            (0.0146, 0.0152)])),
        **dict(zip([("f2", p) for p in PHI_GRID], [
            (0.0218, 0.0091), (0.0186, 0.0091), (0.0153, 0.0081), (0.0129, 0.0083),
            (0.0151, 0.0158)])),
        **dict(zip([("f3", p) for p in PHI_GRID], [
            (0.0285, 0.0134), (0.0230, 0.0125), (0.0206, 0.0124), (0.0164, 0.0111),
            (0.0214, 0.0202)])),
    },
    "T7": dict(zip([("f1", p) for p in PHI_GRID], [
        (0.0178, 0.0104), (0.0122, 0.0092), (0.0073, 0.0059), (0.0031, 0.0026),
        (0.0006, 0.0006)])),
}


@dataclass(frozen=True)
class TableLayout:
    table_id: str
    parameter: str  # "gamma1" or "phi"
    values: tuple[float, ...]
    smooths: tuple[str, ...]
    n: int
    estimators: tuple[EstimatorConfig, ...]


def layout(table_id: str) -> TableLayout:
    if table_id not in TABLE_IDS:
        raise ValueError(f"unknown table {table_id!r}; choose from {list(TABLE_IDS)}")
    diff_ma = (EstimatorConfig("difference", MA_TABLE_M),)
    if table_id == "T1":
        return TableLayout(table_id, "gamma1", GAMMA1_GRID, SMOOTHS, 1600, diff_ma)
    if table_id == "T2":
        return TableLayout(table_id, "gamma1", GAMMA1_GRID, SMOOTHS, 1600, diff_ma)
    if table_id == "T3":
        return TableLayout(table_id, "gamma1", GAMMA1_GRID, SMOOTHS, 3000, diff_ma)
    if table_id == "T4":
        return TableLayout(table_id, "phi", PHI_GRID, SMOOTHS, 1600, (EstimatorConfig("difference", 2),))
    if table_id == "T5":
        return TableLayout(table_id, "phi", PHI_GRID, SMOOTHS, 1600, (EstimatorConfig("hvk", 2),))
    if table_id == "T6":
        return TableLayout(
            table_id, "phi", PHI_GRID, SMOOTHS, 1600,
            (EstimatorConfig("difference", 2), EstimatorConfig("hvk", 2)),
        )
    return TableLayout(table_id, "phi", PHI_GRID, ("f1",), 1600, (EstimatorConfig("difference", 3),))


def cell_spec(table_id: str, smooth: str, value: float, seed: int, replications: int = 500) -> ExperimentSpec:
    lay = layout(table_id)
    if lay.parameter == "gamma1":
        innovation = "t4" if table_id == "T2" else "gaussian"
        model = noise_mod.MA1Dependent(value, innovation)
    else:
        model = noise_mod.AR1(value)
    row = lay.smooths.index(smooth)
    col = lay.values.index(value)
    return ExperimentSpec(
        step=simulation_signal(),
        smooth=smooth,
        noise=model,
        n=lay.n,
        replications=replications,
        seed=seed,
        estimators=lay.estimators,
        target_lags=(1, 2),
        stream=_TABLE_NUMBER[table_id] * 1000 + row * 100 + col,
        name=f"{table_id}_{smooth}_{lay.parameter}={value:g}",
    )


@dataclass
class TableResult:
    table_id: str
    layout: TableLayout
    reports: dict[tuple[str, float], MseReport]

    def mse(self, smooth: str, value: float, lag: int, estimator: str | None = None) -> float:
        rep = self.reports[(smooth, value)]
        label = estimator or self.layout.estimators[0].label
        return rep.mse(label, lag)

    def mse_se(self, smooth: str, value: float, lag: int, estimator: str | None = None) -> float:
        rep = self.reports[(smooth, value)]
        label = estimator or self.layout.estimators[0].label
        return rep.cell(label, lag).mse_se

    def reference(self, smooth: str, value: float, lag: int) -> float | None:
        ref = REFERENCE.get(self.table_id, {}).get((smooth, value))
        return None if ref is None else ref[lag - 1]

    def rows(self) -> list[dict]:
        out = []
        for (smooth, value), rep in self.reports.items():
            for c in rep.cells:
                if c.quantity != "rho":
                    continue
                ref = None
                if len(self.layout.estimators) == 1:
                    ref = self.reference(smooth, value, c.lag)
                out.append(
                    {
                        "table": self.table_id,
                        "smooth": smooth,
                        self.layout.parameter: value,
                        "estimator": c.estimator,
                        "lag": c.lag,
                        "mse": c.mse,
                        "mse_se": c.mse_se,
                        "bias": c.bias,
                        "variance": c.variance,
                        "replications": c.replications,
                        "reference": "" if ref is None else ref,
                    }
                )
        return out

    def to_csv(self) -> str:
        rows = self.rows()
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (f"{v:.17g}" if isinstance(v, float) else v) for k, v in r.items()})
        return buf.getvalue()

    def render(self, with_se: bool = True) -> str:
        """Markdown table: one row per (smooth, estimator), two columns per parameter."""
        sym = "gamma_1" if self.layout.parameter == "gamma1" else "phi"
        head = [""] + [f"{sym}={v:g} rho_{h}" for v in self.layout.values for h in (1, 2)]
        lines = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
        for est in self.layout.estimators:
            for smooth in self.layout.smooths:
                label = smooth if len(self.layout.estimators) == 1 else f"{smooth} {est.label}"
                cells = [label]
                for v in self.layout.values:
                    for h in (1, 2):
                        rep = self.reports[(smooth, v)]
                        c = rep.cell(est.label, h)
                        cells.append(f"{c.mse:.4f} ({c.mse_se:.4f})" if with_se else f"{c.mse:.4f}")
                lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines)


def run_table(
    table_id: str, seed: int, replications: int = 500, workers: int | None = None
) -> TableResult:
    lay = layout(table_id)
    reports = {}
    for smooth in lay.smooths:
        for value in lay.values:
            spec = cell_spec(table_id, smooth, value, seed, replications)
            reports[(smooth, value)] = run_experiment(spec, workers)
    return TableResult(table_id, lay, reports)
