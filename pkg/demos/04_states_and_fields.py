"""
States, conditional expectations and fields
===========================================

A state with density commuting with y = sum w_j a_j* x_j a_j gives a
conditional expectation onto functions of y. The Jensen gap under that
state splits into scalar gaps, one for each eigenvalue of y.
"""
import numpy as np

from jensen_lab import (
    BlockTraceAlgebra,
    Interval,
    State,
    centralizer_test,
    commuting_state,
    conditional_expectation,
    field_jensen_gap,
    lookup,
    random_atomic_field,
)

# not every state can be used: the flip does not commute with diag(0.7, 0.3)
ok, norm = centralizer_test(State(np.diag([0.7, 0.3])), [[0, 1], [1, 0]])
print("flip in centralizer:", ok, " commutator norm", round(norm, 4))

# a field in a two-block algebra with block traces weighted (1, 2)
alg = BlockTraceAlgebra((2, 2), (1.0, 2.0))
fld = random_atomic_field(3, None, Interval.closed(-1, 1), seed=5, algebra=alg)
y = fld.mean()
state = commuting_state(y, seed=6, algebra=alg)

table = conditional_expectation(state, y, fld.gram())
print("expectation of sum w a* a at each eigenvalue:", np.round(table.values, 12))

rep = field_jensen_gap(lookup("exp"), fld, state)
print(f"gap {rep.gap:.5f}, pointwise slacks {np.round(rep.pointwise_slack, 5)}")
print("aggregation residual", rep.aggregation_residual, " pairing residual", rep.pairing_residual)
