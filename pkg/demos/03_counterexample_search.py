"""
Searching for convexity violations
==================================

|t| is convex but not operator convex. A randomized search over 2x2
Hermitian pairs finds a violation of the midpoint-style inequality, refines
it, and the counterexample replays through the checked path.
"""
from jensen_lab import Interval, ProbeConfig, lookup, probe
from jensen_lab.prober import pad_counterexample, revalidate

f = lookup("abs")
report = probe(ProbeConfig(f, Interval.closed(-1, 1), orders=(1, 2), trials=5000, seed=7))
print("least defect by order:", report.min_defect)

c = report.counterexamples[0]
print(f"order {c.order}, lam = {c.lam:.3f}, min eig {c.min_eig:.4f}, seed {c.seed}")
print("revalidated:", revalidate(c, f).min_eig)

# any order-n violation also lives at order n + 1
big = pad_counterexample(c, 0.3)
print("padded to order", big.order, "min eig", revalidate(big, f).min_eig)

# t^2 is operator convex, so nothing turns up
square = probe(ProbeConfig(lookup("square"), Interval.closed(-1, 1), orders=(2, 3), trials=2000))
print("square found anything:", square.found)
