"""smcensus: a verification toolkit for counting stable matchings.

Submodules: instances (data model and generation), matchings (deferred
acceptance and brute-force enumeration), rotations (rotation poset),
posets (downsets and tangled grids), counting (tuple-family bounds),
distributions (gap laws and dominance checks), bounds (identities and
series constants), verify (acceptance suite), cli (command line).
"""

__version__ = "0.1.0"
