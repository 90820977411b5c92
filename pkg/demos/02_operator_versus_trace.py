"""
Operator form versus trace form
===============================

t^2 satisfies the Jensen operator inequality, while t^4 satisfies only the
trace version. Each eigenvector of the compressed operator carries a
probability measure whose barycenter is its eigenvalue, and the trace gap
splits into scalar Jensen gaps.
"""
import numpy as np

from jensen_lab import (
    Interval,
    OperatorColumn,
    ProbeConfig,
    jensen_operator_defect,
    lookup,
    probe,
    random_hermitian_in,
    random_unital_column,
    replay_pinching_chain,
    trace_jensen_report,
)

# a 2x2 pair where t^4 breaks the operator form, found by the prober
c = probe(ProbeConfig(lookup("quartic"), Interval.closed(-2, 2), orders=(2,), seed=7)).counterexamples[0]
col = OperatorColumn(np.stack([np.sqrt(c.lam) * np.eye(2), np.sqrt(1 - c.lam) * np.eye(2)]))
xs = np.stack([c.x, c.y])

for name in ("square", "quartic"):
    f = lookup(name)
    op = jensen_operator_defect(f, col, xs)
    tr = trace_jensen_report(f, col, xs)
    print(f"{name:8s} operator min eig {op.min_eig:+.4f}   trace gap {tr.gap:+.4f}")

# per-eigenvector witnesses for t^4
tr = trace_jensen_report(lookup("quartic"), col, xs, with_atoms=True)
for w in tr.witnesses:
    print(f"  eigenvalue {w.eigenvalue:+.3f}  mass {w.mass:.3f}  barycenter {w.barycenter:+.3f}"
          f"  local gap {w.gap:.4f}")
print("sum of local gaps - trace gap:", tr.aggregation_residual)

# replaying the dilation-and-pinching derivation step by step on a random instance
rng = np.random.default_rng(3)
col = random_unital_column(2, 3, rng)
xs = np.stack([random_hermitian_in(3, Interval.closed(-1, 1), rng) for _ in range(2)])
chain = replay_pinching_chain(lookup("square"), col, xs, s=0.0)
for step in chain.steps:
    print(f"  {step.label:32s} {step.kind:10s} {step.value:.2e} {'ok' if step.ok else 'FAILED'}")
