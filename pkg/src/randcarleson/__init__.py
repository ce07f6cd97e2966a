"""Numerical workbench for random discrete Carleson-type maximal operators.

Selector sequences with polynomially decaying selection probability,
modulated singular convolutions and their maximal variants over finite
frequency sets, sparse-form certificates, Muckenhoupt weights, and a
reproducible experiment harness.
"""

__version__ = "0.1.0"
