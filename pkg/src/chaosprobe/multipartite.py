"""N-partite Hamiltonians with k-body tensor-product couplings.

    H = sum_j H_j^(0) + eps_1 sum_{j<k} H_j^(1) x H_k^(1) + ... + eps_{N-1} x_j H_j^(N-1)

Subsystems are indexed from 0.  The superscript ``l - 1`` of the factors in an
``l``-body term is called the *order index* below.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence, Union

import numpy as np

from .ensembles import goe_matrix
from .linalg import MAX_DIM, DimensionError, embed


class MissingTermError(KeyError):
    pass


@dataclass(frozen=True)
class MultipartiteSpec:
    """Subsystem matrices and couplings of one Hamiltonian.

    ``terms[j]`` is a sequence of matrices indexed by order index; a
    single-element sequence is reused for every order (the H^(0) = H^(1) = ...
    simplification).  ``couplings[l - 2]`` is the constant of the l-body term.
    """

    dims: tuple
    terms: tuple
    couplings: tuple = ()
    orders: frozenset = None
    include_local: bool = True

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        n = len(dims)
        if n < 1 or any(d < 1 for d in dims):
            raise ValueError(f"dims must be a non-empty sequence of positive integers, got {self.dims}")
        if len(self.terms) != n:
            raise ValueError(f"expected term matrices for {n} subsystems, got {len(self.terms)}")
        couplings = tuple(float(c) for c in self.couplings)
        if not all(np.isfinite(couplings)):
            raise ValueError(f"couplings must be finite, got {couplings}")
        object.__setattr__(self, "couplings", couplings)
        orders = self.orders
        if orders is None:
            orders = range(2, min(n, len(couplings) + 1) + 1)
        orders = frozenset(int(l) for l in orders)
        for l in orders:
            if not 2 <= l <= n:
                raise ValueError(f"interaction order {l} outside 2..{n}")
            if l - 2 >= len(couplings):
                raise ValueError(f"no coupling constant given for the {l}-body interaction")
        object.__setattr__(self, "orders", orders)
        terms = []
        for j, mats in enumerate(self.terms):
            if isinstance(mats, np.ndarray) and mats.ndim == 2:
                mats = (mats,)
            mats = tuple(None if m is None else np.asarray(m) for m in mats)
            for m in mats:
                if m is not None and m.shape != (dims[j], dims[j]):
                    raise DimensionError(
                        f"term matrix of subsystem {j} has shape {m.shape}, expected dimension {dims[j]}"
                    )
            terms.append(mats)
        object.__setattr__(self, "terms", tuple(terms))

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def term(self, j: int, order_index: int) -> np.ndarray:
        mats = self.terms[j]
        m = mats[0] if len(mats) == 1 else (mats[order_index] if order_index < len(mats) else None)
        if m is None:
            raise MissingTermError(f"no term matrix for subsystem {j} at order index {order_index}")
        return m

    def coupling(self, l: int) -> float:
        return self.couplings[l - 2]

    def with_couplings(self, couplings: Sequence[float]) -> "MultipartiteSpec":
        return MultipartiteSpec(self.dims, self.terms, tuple(couplings), self.orders, self.include_local)


@dataclass(frozen=True)
class Total:
    pass


@dataclass(frozen=True)
class Local:
    j: int


@dataclass(frozen=True)
class Interaction:
    subset: tuple
    scaled: bool = False

    def __post_init__(self):
        s = tuple(sorted(int(j) for j in self.subset))
        if len(set(s)) != len(s):
            raise ValueError(f"repeated subsystem index in {self.subset}")
        if len(s) < 2:
            raise ValueError("an interaction observable needs at least two subsystems")
        object.__setattr__(self, "subset", s)

    @property
    def order(self) -> int:
        return len(self.subset)


Selector = Union[Total, Local, Interaction]


def _check_dim(spec: MultipartiteSpec, max_dim: int):
    if spec.dim > max_dim:
        raise DimensionError(f"Hilbert-space dimension {spec.dim} exceeds maximum {max_dim}")


def local_part(spec: MultipartiteSpec, max_dim: int = MAX_DIM) -> np.ndarray:
    _check_dim(spec, max_dim)
    h = np.zeros((spec.dim, spec.dim), dtype=_dtype(spec))
    if spec.include_local:
        for j in range(spec.n):
            h += embed({j: spec.term(j, 0)}, spec.dims, max_dim)
    return h


def interaction_part(spec: MultipartiteSpec, l: int, max_dim: int = MAX_DIM) -> np.ndarray:
    """Unscaled sum of all l-body products over index subsets j_1 < ... < j_l."""
    _check_dim(spec, max_dim)
    h = np.zeros((spec.dim, spec.dim), dtype=_dtype(spec))
    for subset in combinations(range(spec.n), l):
        h += embed({j: spec.term(j, l - 1) for j in subset}, spec.dims, max_dim)
    return h


def build_total(spec: MultipartiteSpec, max_dim: int = MAX_DIM) -> np.ndarray:
    h = local_part(spec, max_dim)
    for l in sorted(spec.orders):
        eps = spec.coupling(l)
        if eps != 0.0:
            h += eps * interaction_part(spec, l, max_dim)
    return h


def build_observable(spec: MultipartiteSpec, sel: Selector, max_dim: int = MAX_DIM) -> np.ndarray:
    if isinstance(sel, Total):
        return build_total(spec, max_dim)
    _check_dim(spec, max_dim)
    if isinstance(sel, Local):
        if not 0 <= sel.j < spec.n:
            raise ValueError(f"subsystem index {sel.j} out of range for {spec.n} subsystems")
        return embed({sel.j: spec.term(sel.j, 0)}, spec.dims, max_dim)
    if isinstance(sel, Interaction):
        l = sel.order
        if l > spec.n or sel.subset[-1] >= spec.n or sel.subset[0] < 0:
            raise ValueError(f"interaction subset {sel.subset} inconsistent with {spec.n} subsystems")
        x = embed({j: spec.term(j, l - 1) for j in sel.subset}, spec.dims, max_dim)
        if sel.scaled:
            x = spec.coupling(l) * x if l - 2 < len(spec.couplings) else x
        return x
    raise TypeError(f"unknown observable selector {sel!r}")


def _dtype(spec: MultipartiteSpec):
    cplx = any(m is not None and np.iscomplexobj(m) for mats in spec.terms for m in mats)
    return np.complex128 if cplx else np.float64


def sample_goe_multipartite(
    dims: Sequence[int],
    couplings: Sequence[float],
    rng: np.random.Generator,
    sigma: float = 1.0,
    orders=None,
    shared: bool = False,
    include_local: bool = True,
    convention: str = "element",
) -> MultipartiteSpec:
    """Draw every subsystem matrix the Hamiltonian needs independently from GOE(d_j).

    With ``shared=True`` one matrix per subsystem serves every order.
    """
    n = len(dims)
    if orders is None:
        orders = range(2, min(n, len(couplings) + 1) + 1)
    orders = sorted(set(int(l) for l in orders))
    needed = ([0] if include_local else []) + [l - 1 for l in orders]
    terms = []
    for j, d in enumerate(dims):
        if shared:
            terms.append((goe_matrix(d, sigma, rng, convention),))
            continue
        mats = [None] * (max(needed, default=0) + 1)
        for k in needed:
            mats[k] = goe_matrix(d, sigma, rng, convention)
        terms.append(tuple(mats))
    return MultipartiteSpec(tuple(dims), tuple(terms), tuple(couplings), frozenset(orders), include_local)
