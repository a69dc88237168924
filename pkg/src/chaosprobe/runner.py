"""Seeded, parallel ensemble averaging of G(t) with streaming statistics.

Realization ``r`` of a job draws its disorder from
``realization_rng(master_seed, r)``, so results do not depend on which worker
runs it.  Realizations are grouped into fixed blocks of ``BLOCK_SIZE``
consecutive indices; each block is folded in index order and blocks are merged
in index order, which makes the final statistics independent of the worker
count.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Union

import numpy as np

from .characteristic import evaluate_curve, thermal_weights, time_grid
from .ensembles import CONVENTIONS, realization_rng
from .linalg import EigensolverError
from .multipartite import Interaction, Local, Total, build_observable, build_total, sample_goe_multipartite
from .syk import CsykSpec, build_csyk

log = logging.getLogger(__name__)

BLOCK_SIZE = 8
MAX_FAILURE_FRACTION = 0.01
CHECKPOINT_FORMAT = "chaosprobe-ensemble"
CHECKPOINT_VERSION = 1

CSYK_OBSERVABLES = ("total", "left", "right", "bilinear")


class SpecError(ValueError):
    pass


class CheckpointError(ValueError):
    pass


class EnsembleFailure(RuntimeError):
    pass


# -- run specification --------------------------------------------------------

@dataclass(frozen=True)
class GoeModel:
    dims: tuple
    couplings: tuple = ()
    orders: Optional[tuple] = None
    sigma: float = 1.0
    shared: bool = False
    include_local: bool = True
    convention: str = "element"
    kind: str = field(default="goe", init=False)

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "couplings", tuple(float(c) for c in self.couplings))
        if self.orders is not None:
            object.__setattr__(self, "orders", tuple(sorted(int(l) for l in self.orders)))
        n = len(self.dims)
        if n < 1 or any(d < 1 for d in self.dims):
            raise SpecError(f"dims must be positive integers, got {self.dims}")
        if not self.sigma > 0:
            raise SpecError(f"sigma must be positive, got {self.sigma}")
        if self.convention not in CONVENTIONS:
            raise SpecError(f"unknown GOE convention {self.convention!r}")
        for l in self.orders or ():
            if not 2 <= l <= n:
                raise SpecError(f"interaction order {l} outside 2..{n}")
            if l - 2 >= len(self.couplings):
                raise SpecError(f"no coupling constant for the {l}-body interaction")
        if len(self.couplings) > max(n - 1, 0):
            raise SpecError(f"{len(self.couplings)} couplings given for {n} subsystems (at most {n - 1})")

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))


@dataclass(frozen=True)
class CsykModel:
    n_per_side: int
    J: float = 1.0
    K: float = 1.0
    mu: float = 0.0
    kind: str = field(default="csyk", init=False)

    def __post_init__(self):
        try:
            CsykSpec(self.n_per_side, self.J, self.K, self.mu)
        except ValueError as exc:
            raise SpecError(str(exc)) from exc

    @property
    def dim(self) -> int:
        return 2**self.n_per_side


Model = Union[GoeModel, CsykModel]


@dataclass(frozen=True)
class TimeGrid:
    t_min: float = 1e-2
    t_max: float = 1e4
    points: int = 400
    log: bool = True

    def __post_init__(self):
        if not (self.t_min > 0 and self.t_max > self.t_min and int(self.points) >= 2):
            raise SpecError(f"invalid time grid: t_min={self.t_min}, t_max={self.t_max}, points={self.points}")

    def times(self) -> np.ndarray:
        return time_grid(self.t_min, self.t_max, int(self.points), self.log, include_zero=True)


@dataclass(frozen=True)
class Sweep:
    parameter: str  # "epsilon", "epsilon<l-1>", "mu", "beta" or "realizations"
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise SpecError("sweep needs at least one value")


@dataclass(frozen=True)
class RunSpec:
    model: Model
    beta: float = 0.0
    observable: str = "total"
    grid: TimeGrid = TimeGrid()
    realizations: int = 500
    master_seed: int = 0
    sweeps: tuple = ()
    label: str = ""

    def __post_init__(self):
        if not (np.isfinite(self.beta) and self.beta >= 0):
            raise SpecError(f"beta must be finite and non-negative, got {self.beta}")
        if int(self.realizations) != self.realizations or self.realizations < 1:
            raise SpecError(f"realizations must be a positive integer, got {self.realizations}")
        if not 0 <= int(self.master_seed) < 2**64:
            raise SpecError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        selector(self)  # validates the observable against the model
        object.__setattr__(self, "sweeps", tuple(self.sweeps))
        names = [s.parameter for s in self.sweeps]
        if len(set(names)) != len(names):
            raise SpecError(f"repeated sweep parameter in {names}")
        for sw in self.sweeps:
            for v in sw.values:
                _apply_sweep(replace(self, sweeps=()), sw.parameter, v)

    def times(self) -> np.ndarray:
        return self.grid.times()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["model"] = asdict(self.model)
        return d

    def expand(self) -> list["RunSpec"]:
        """Sweep-free specs over the Cartesian product of all sweeps (or ``[self]``).

        The first sweep varies slowest.
        """
        out = [replace(self, sweeps=())]
        for sw in self.sweeps:
            out = [
                replace(_apply_sweep(s, sw.parameter, v),
                        label=", ".join(filter(None, [s.label, f"{sw.parameter}={v:g}"])))
                for s in out for v in sw.values
            ]
        return out


def _apply_sweep(spec: RunSpec, parameter: str, value: float) -> RunSpec:
    m = spec.model
    if parameter == "beta":
        return replace(spec, beta=value)
    if parameter == "realizations":
        return replace(spec, realizations=int(value))
    if parameter == "mu":
        if not isinstance(m, CsykModel):
            raise SpecError("a mu sweep requires the csyk model")
        return replace(spec, model=replace(m, mu=value))
    if parameter == "epsilon":
        if not isinstance(m, GoeModel) or not m.couplings:
            raise SpecError("an epsilon sweep requires a goe model with couplings")
        return replace(spec, model=replace(m, couplings=(value,) * len(m.couplings)))
    if parameter.startswith("epsilon"):
        if not isinstance(m, GoeModel):
            raise SpecError("an epsilon sweep requires the goe model")
        try:
            k = int(parameter[len("epsilon"):])
        except ValueError:
            raise SpecError(f"unknown sweep parameter {parameter!r}") from None
        if not 1 <= k <= len(m.couplings):
            raise SpecError(f"sweep parameter {parameter} has no matching coupling")
        c = list(m.couplings)
        c[k - 1] = value
        return replace(spec, model=replace(m, couplings=tuple(c)))
    raise SpecError(f"unknown sweep parameter {parameter!r}")


def parse_observable(text: str, model: Model):
    """Map an observable string onto a selector.

    GOE models: ``total``, ``local:<j>``, ``interaction:<j>,<k>[,...]`` (append
    ``:scaled`` to include the coupling constant).  cSYK: ``total``, ``left``,
    ``right``, ``bilinear``.
    """
    text = text.strip().lower()
    if isinstance(model, CsykModel):
        if text not in CSYK_OBSERVABLES:
            raise SpecError(f"unknown csyk observable {text!r}; expected one of {CSYK_OBSERVABLES}")
        return text
    n = len(model.dims)
    if text == "total":
        return Total()
    kind, _, rest = text.partition(":")
    if kind == "local":
        try:
            j = int(rest)
        except ValueError:
            raise SpecError(f"bad local observable {text!r}") from None
        if not 0 <= j < n:
            raise SpecError(f"local subsystem {j} out of range for {n} subsystems")
        if not model.include_local:
            raise SpecError("local observable requested but local terms are excluded")
        return Local(j)
    if kind == "interaction":
        idx, _, flag = rest.partition(":")
        try:
            subset = tuple(int(s) for s in idx.split(","))
            sel = Interaction(subset, scaled=(flag == "scaled"))
        except ValueError as exc:
            raise SpecError(f"bad interaction observable {text!r}: {exc}") from None
        if sel.order > n or sel.subset[-1] >= n or sel.subset[0] < 0:
            raise SpecError(f"interaction order {sel.order} on subsystems {sel.subset} inconsistent with N={n}")
        return sel
    raise SpecError(f"unknown observable {text!r}")


def selector(spec: RunSpec):
    return parse_observable(spec.observable, spec.model)


def spec_hash(spec: RunSpec) -> str:
    blob = json.dumps(spec.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


# -- one realization ----------------------------------------------------------

def realization_curve(spec: RunSpec, r: int, times: np.ndarray | None = None) -> tuple[np.ndarray, float]:
    """G(t) of realization ``r`` and log Z(beta) of its Hamiltonian."""
    if times is None:
        times = spec.times()
    rng = realization_rng(spec.master_seed, r)
    m = spec.model
    sel = selector(spec)
    if isinstance(m, GoeModel):
        mp = sample_goe_multipartite(m.dims, m.couplings, rng, m.sigma, m.orders, m.shared,
                                     m.include_local, m.convention)
        h = build_total(mp)
        x = None if isinstance(sel, Total) else build_observable(mp, sel)
    else:
        hams = build_csyk(CsykSpec(m.n_per_side, m.J, m.K, m.mu), rng)
        h = hams.h_total
        x = {"total": None, "left": hams.h_left, "right": hams.h_right, "bilinear": hams.h_bilinear}[sel]
    w = thermal_weights(h, x, spec.beta)
    return evaluate_curve(w, times).G_values, w.log_partition


# -- streaming statistics -----------------------------------------------------

@dataclass
class EnsembleStats:
    """Running mean and sum of squared deviations of G(t) over realizations.

    ``mean_z`` and ``mean_z2g`` accumulate Z(beta) and Z(beta)^2 G(t) so the
    annealed ratio <|Z(beta+it)|^2> / <Z(beta)>^2 is available alongside the
    quenched mean.
    """

    times: np.ndarray
    mean: np.ndarray
    m2: np.ndarray
    count: int = 0
    mean_z: float = 0.0
    mean_z2g: np.ndarray = None
    master_seed: int = 0
    completed: list = field(default_factory=list)
    failed: list = field(default_factory=list)
    spec_hash: str = ""

    @classmethod
    def empty(cls, times, master_seed: int = 0, spec_hash: str = "") -> "EnsembleStats":
        t = np.asarray(times, dtype=float)
        return cls(t, np.zeros_like(t), np.zeros_like(t), 0, 0.0, np.zeros_like(t), int(master_seed),
                   [], [], spec_hash)

    @property
    def variance(self) -> np.ndarray:
        if self.count < 2:
            return np.zeros_like(self.mean)
        return np.maximum(self.m2, 0.0) / (self.count - 1)

    @property
    def stderr(self) -> np.ndarray:
        if self.count < 2:
            return np.zeros_like(self.mean)
        return np.sqrt(self.variance / self.count)

    @property
    def annealed(self) -> np.ndarray:
        return self.mean_z2g / self.mean_z**2

    def update(self, index: int, G: np.ndarray, log_z: float = 0.0) -> None:
        self.count += 1
        delta = G - self.mean
        self.mean = self.mean + delta / self.count
        self.m2 = self.m2 + delta * (G - self.mean)
        z = float(np.exp(log_z))
        self.mean_z += (z - self.mean_z) / self.count
        self.mean_z2g = self.mean_z2g + (z * z * G - self.mean_z2g) / self.count
        self.completed.append(int(index))

    def copy(self) -> "EnsembleStats":
        return replace(self, times=self.times.copy(), mean=self.mean.copy(), m2=self.m2.copy(),
                       mean_z2g=self.mean_z2g.copy(), completed=list(self.completed), failed=list(self.failed))


def merge(a: EnsembleStats, b: EnsembleStats) -> EnsembleStats:
    """Pairwise (Chan et al.) combination of two disjoint partial ensembles."""
    if a.times.shape != b.times.shape or not np.array_equal(a.times, b.times):
        raise ValueError("cannot merge statistics on different time grids")
    if a.spec_hash and b.spec_hash and a.spec_hash != b.spec_hash:
        raise ValueError("cannot merge statistics of different run specs")
    overlap = set(a.completed) & set(b.completed)
    if overlap:
        raise ValueError(f"realization indices overlap: {sorted(overlap)[:10]}")
    if b.count == 0:
        out = a.copy()
        out.failed = sorted(set(map(tuple, a.failed)) | set(map(tuple, b.failed)))
        return out
    if a.count == 0:
        return merge(b, a)
    n = a.count + b.count
    delta = b.mean - a.mean
    mean = (a.count * a.mean + b.count * b.mean) / n
    m2 = a.m2 + b.m2 + delta * delta * (a.count * b.count / n)
    mean_z = (a.count * a.mean_z + b.count * b.mean_z) / n
    mean_z2g = (a.count * a.mean_z2g + b.count * b.mean_z2g) / n
    return EnsembleStats(a.times.copy(), mean, m2, n, mean_z, mean_z2g, a.master_seed,
                         sorted(a.completed + b.completed),
                         sorted(set(map(tuple, a.failed)) | set(map(tuple, b.failed))),
                         a.spec_hash or b.spec_hash)


# -- checkpoints --------------------------------------------------------------

def _stats_to_dict(stats: EnsembleStats, spec: RunSpec | None) -> dict:
    return {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "spec_hash": stats.spec_hash,
        "spec": spec.to_dict() if spec is not None else None,
        "times": stats.times.tolist(),
        "count": stats.count,
        "mean": stats.mean.tolist(),
        "m2": stats.m2.tolist(),
        "mean_z": stats.mean_z,
        "mean_z2g": stats.mean_z2g.tolist(),
        "ledger": {
            "master_seed": stats.master_seed,
            "completed": list(stats.completed),
            "failed": [list(f) for f in stats.failed],
        },
    }


def checkpoint(stats: EnsembleStats, path, spec: RunSpec | None = None) -> None:
    """Atomically write the statistics and seed ledger as versioned JSON."""
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(_stats_to_dict(stats, spec), fh)
    os.replace(tmp, path)


def resume(path, spec: RunSpec | None = None) -> EnsembleStats:
    """Load a checkpoint; with ``spec`` given, refuse files written for another spec."""
    path = os.fspath(path)
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"corrupt checkpoint {path}: {exc.msg} at offset {exc.pos}") from None
    if not isinstance(doc, dict) or doc.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"{path} is not a {CHECKPOINT_FORMAT} checkpoint")
    if doc.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {doc.get('version')}")
    if spec is not None and doc.get("spec_hash") != spec_hash(spec):
        raise CheckpointError("checkpoint was written by a different run spec; refusing to resume")
    try:
        ledger = doc["ledger"]
        stats = EnsembleStats(
            np.array(doc["times"], dtype=float), np.array(doc["mean"], dtype=float),
            np.array(doc["m2"], dtype=float), int(doc["count"]), float(doc["mean_z"]),
            np.array(doc["mean_z2g"], dtype=float), int(ledger["master_seed"]),
            [int(i) for i in ledger["completed"]], [tuple(f) for f in ledger["failed"]],
            doc["spec_hash"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CheckpointError(f"malformed checkpoint {path}: {exc!r}") from None
    if stats.count != len(stats.completed):
        raise CheckpointError(f"checkpoint count {stats.count} disagrees with ledger size {len(stats.completed)}")
    return stats


# -- driver -------------------------------------------------------------------

def _run_block(spec: RunSpec, indices: list[int]) -> EnsembleStats:
    times = spec.times()
    stats = EnsembleStats.empty(times, spec.master_seed, spec_hash(spec))
    for r in indices:
        try:
            G, logz = realization_curve(spec, r, times)
        except (EigensolverError, np.linalg.LinAlgError, ArithmeticError) as exc:
            log.warning("realization %d (master seed %d) failed: %s", r, spec.master_seed, exc)
            stats.failed.append((int(r), str(exc)))
            continue
        stats.update(r, G, logz)
    return stats


def run_ensemble(spec: RunSpec, parallelism: int = 1, checkpoint_path=None, stop_after: int | None = None,
                 checkpoint_every: int = 4) -> EnsembleStats:
    """Quenched ensemble average of G(t) over ``spec.realizations`` disorder draws.

    With ``checkpoint_path`` set, an existing checkpoint for the same spec is
    resumed and progress is written every ``checkpoint_every`` blocks.
    ``stop_after`` limits this call to realization indices below it (the run
    can be completed later from the checkpoint).
    """
    if spec.sweeps:
        raise SpecError("expand the sweeps first (RunSpec.expand)")
    if int(parallelism) < 1:
        raise ValueError(f"parallelism must be positive, got {parallelism}")
    h = spec_hash(spec)
    stats = EnsembleStats.empty(spec.times(), spec.master_seed, h)
    if checkpoint_path is not None and os.path.exists(checkpoint_path):
        stats = resume(checkpoint_path, spec)
        log.info("resumed %d realizations from %s", stats.count, checkpoint_path)
    done = set(stats.completed) | {int(f[0]) for f in stats.failed}
    end = spec.realizations if stop_after is None else min(spec.realizations, int(stop_after))
    blocks = []
    for start in range(0, end, BLOCK_SIZE):
        idx = [r for r in range(start, min(start + BLOCK_SIZE, end)) if r not in done]
        if idx:
            blocks.append(idx)

    def fold(partial, k):
        nonlocal stats
        stats = merge(stats, partial)
        if checkpoint_path is not None and ((k + 1) % checkpoint_every == 0 or k + 1 == len(blocks)):
            checkpoint(stats, checkpoint_path, spec)

    if parallelism == 1 or len(blocks) <= 1:
        for k, idx in enumerate(blocks):
            fold(_run_block(spec, idx), k)
    else:
        with ProcessPoolExecutor(max_workers=int(parallelism)) as pool:
            futures = [pool.submit(_run_block, spec, idx) for idx in blocks]
            for k, fut in enumerate(futures):
                fold(fut.result(), k)

    if len(stats.failed) > MAX_FAILURE_FRACTION * spec.realizations:
        raise EnsembleFailure(
            f"{len(stats.failed)} of {spec.realizations} realizations failed "
            f"(seeds: {[f[0] for f in stats.failed][:10]})"
        )
    return stats


def run_sweep(spec: RunSpec, parallelism: int = 1) -> list[tuple[RunSpec, EnsembleStats]]:
    return [(s, run_ensemble(s, parallelism)) for s in spec.expand()]
