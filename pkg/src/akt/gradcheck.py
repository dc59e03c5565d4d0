"""Central-difference verification of analytic gradients.

The workhorse behind every gradient test in the suite: run the analytic
backward pass once, then probe parameter entries with f(θ±ε) and compare
slopes. Relative error uses |a-b| / max(1, |a|, |b|) so tiny gradients
are judged on absolute scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .tensor import NonFiniteError, Tensor, no_grad, zero_grads


@dataclass
class GradCheckReport:
    max_rel_error: float
    tolerance: float
    n_probes: int
    worst_param: int = -1
    worst_index: int = -1
    errors: list[float] = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return self.max_rel_error < self.tolerance


def grad_check(
    f: Callable[[], Tensor],
    params: Sequence[Tensor],
    eps: float = 1e-5,
    tolerance: float = 1e-4,
    max_probes_per_param: int | None = None,
    rng: np.random.Generator | None = None,
) -> GradCheckReport:
    """Compare analytic gradients of the scalar f() against central
    differences (f(θ+ε) - f(θ-ε)) / 2ε for every probed parameter entry.

    f must be a deterministic closure over `params` returning a scalar
    Tensor; it is re-evaluated under no_grad for each probe. When
    `max_probes_per_param` is given, entries are subsampled with `rng`.
    """
    if not 1e-7 <= eps <= 1e-3:
        raise ValueError(f"eps {eps} outside [1e-7, 1e-3]")
    params = list(params)
    zero_grads(params)
    out = f()
    if out.data.size != 1:
        raise ValueError("grad_check needs a scalar-valued f")
    out.backward()
    analytic = [
        np.zeros_like(p.data) if p.grad is None else p.grad.copy() for p in params
    ]

    if rng is None:
        rng = np.random.default_rng(0)

    report = GradCheckReport(max_rel_error=0.0, tolerance=tolerance, n_probes=0)
    with no_grad():
        for pi, p in enumerate(params):
            idx = np.arange(p.data.size)
            if max_probes_per_param is not None and p.data.size > max_probes_per_param:
                idx = rng.choice(p.data.size, size=max_probes_per_param, replace=False)
            for j in idx:
                orig = p.data.flat[j]
                p.data.flat[j] = orig + eps
                f_plus = f().item()
                p.data.flat[j] = orig - eps
                f_minus = f().item()
                p.data.flat[j] = orig
                if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
                    raise NonFiniteError("f evaluated to a non-finite value")
                numeric = (f_plus - f_minus) / (2.0 * eps)
                a = analytic[pi].flat[j]
                rel = abs(a - numeric) / max(1.0, abs(a), abs(numeric))
                report.errors.append(rel)
                report.n_probes += 1
                if rel > report.max_rel_error:
                    report.max_rel_error = rel
                    report.worst_param = pi
                    report.worst_index = int(j)
    return report
