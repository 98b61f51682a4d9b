"""
Stationary scattering on the rectangular barrier: amplitudes, the denominator u and its continuation
to complex momenta, and the stationary (phase and Larmor-clock) times.
"""
