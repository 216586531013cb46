"""
Arithmetic over residue rings Z_q: set algebra, exponential sums,
regularization, solution counting, covering numbers and matrix actions.
"""
