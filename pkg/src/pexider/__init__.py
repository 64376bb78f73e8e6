"""Convex-set calculus and a decomposition engine for set-valued Pexider equations."""
