"""Unit test package for tunnelers."""
