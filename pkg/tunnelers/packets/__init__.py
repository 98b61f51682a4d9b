"""
Module containing the Gaussian packet, its evaluation by momentum quadrature and the region probabilities
"""
