"""collatzlab: a computational laboratory for the 3x+1 problem and friends.

Subpackages cover the iteration engine (maps), trajectory statistics and
verification sweeps (stats), the coefficient stopping time (coeffstop),
cycle algebra and cycle-length bounds (cycles), inverse iteration trees
(trees), the 2-adic conjugacy permutation (twoadic), FRACTRAN machines
(fractran), Markov analysis of residue maps (markov), stochastic models
(stochastic), and satellite problems (extras).
"""

__version__ = "0.1.0"
