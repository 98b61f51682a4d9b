"""
Module containing the run configuration, the reproduction stages and the command line
"""
