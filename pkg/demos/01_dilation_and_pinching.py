"""
Unitary dilation and pinching
=============================

A unital column of matrices sits in the last block column of a unitary.
Conjugating that unitary with powers of a block phase matrix and averaging
keeps only the diagonal blocks.
"""
import numpy as np

from jensen_lab import canonical_dilation, gram_and_classify, pinching_system, random_unital_column
from jensen_lab.columns import augment_to_unital, block_diagonal, unitarity_residual
from jensen_lab import OperatorColumn

np.set_printoptions(precision=3, suppress=True)

# a column (a_1, a_2, a_3) of 2x2 blocks with sum a_k* a_k = 1
col = random_unital_column(3, 2, seed=1)
print("kind:", gram_and_classify(col).kind)

# the dilation is unitary and carries the column in its last block column
U = canonical_dilation(col)
print("U shape:", U.shape, " ||U*U - 1|| =", unitarity_residual(U))
print("last block column equals the column:", np.array_equal(U[:6, 6:], col.stacked()))

# a contraction is first completed to a unital column with sqrt(1 - sum a_k* a_k)
half = OperatorColumn([0.5 * np.eye(2)])
print("contraction augmented to", augment_to_unital(half).n, "blocks")

# pinching with the n-th roots of unity
ps = pinching_system(4, 2)
A = np.arange(64, dtype=float).reshape(8, 8)
P = ps.pinch(A)
print("pinch == block diagonal:", np.allclose(P, block_diagonal(A, 4, 2)))
print("projections resolve the identity:", np.allclose(sum(ps.projections()), np.eye(8)))
