"""Nodal sets of arithmetic and Berry random waves."""
