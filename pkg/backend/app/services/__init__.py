"""
diffset toolkit - Services
Verification suites, single computations and extremal search.
"""
