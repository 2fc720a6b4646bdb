"""Holant verification reports shared by the classical and quantum pipelines."""
from __future__ import annotations

from dataclasses import dataclass, field

PASS = "PASS"
FAIL = "FAIL"
EXPLORATORY = "EXPLORATORY"
VERDICTS = (PASS, FAIL, EXPLORATORY)


def edge_name(edge) -> str:
    return f"({edge[0]},{edge[1]})"


@dataclass
class HolantReport:
    """Both sides of a Holant identity together with every precondition residual.

    Residual maps are keyed by edge ``(variable, factor)`` or node id.  The
    ``failures`` list holds human-readable reasons, naming the offending edge
    or node, whenever the verdict is not PASS.
    """

    kind: str
    z_original: complex
    z_transformed: complex
    discrepancy: float
    edge_residuals: dict = field(default_factory=dict)
    edge_modes: dict = field(default_factory=dict)
    node_commutation: dict = field(default_factory=dict)
    factor_commutation: float = 0.0
    factor_dephasing: dict = field(default_factory=dict)
    transposed_discrepancy: float = 0.0
    form_disagreement: float = 0.0
    order_sensitivity: float = 0.0
    verdict: str = PASS
    failures: list = field(default_factory=list)
    failed_edges: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def summary(self) -> str:
        zo, zt = self.z_original, self.z_transformed
        line = (
            f"{self.kind} Holant: Z={zo.real:.12g}{zo.imag:+.3g}j  "
            f"Zhat={zt.real:.12g}{zt.imag:+.3g}j  rel.disc={self.discrepancy:.3e}  "
            f"verdict={self.verdict}"
        )
        if self.failures:
            line += "\n  " + "\n  ".join(self.failures)
        return line
