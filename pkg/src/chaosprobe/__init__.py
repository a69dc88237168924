"""Characteristic-function probes of quantum chaos in multipartite random-matrix and coupled SYK systems."""

__version__ = "0.1.0"
