"""
Module containing the packet-based characteristic times and the depletion analysis
"""
