"""
Module containing all core things (configuration types, base classes, decorators, utilities, etc.)
used by the scattering, packet and time estimators
"""
