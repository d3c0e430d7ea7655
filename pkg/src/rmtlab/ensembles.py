"""Seed-driven construction of the random-matrix ensembles.

Every sampler is defined the same way: build (once, cached) an orbit map
that assigns each matrix position to an independent random variable, then
draw one Gaussian per orbit and scatter it to all positions of the orbit.
Symmetry identities therefore hold bitwise by construction, and re-sampling
with the same (spec, stream) is bit-identical.

Index labeling for the flip-symmetric ensembles follows the sector order
{1..N, -N..-1}, under which the identification V[a][b] = V[-b][-a] is the
reflection of the matrix about its antidiagonal: (r, c) -> (D-1-c, D-1-r)
in 0-based indices.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Iterator, Optional

import numpy as np

from .errors import InvalidSpecError
from .streams import RandomStream, complex_normals, normals

MAGIC = b"RMTM"
DUMP_VERSION = 1


class EnsembleKind(str, Enum):
    GUE = "gue"
    FLIP2D = "flip2d"
    HIER_TOY = "hier-toy"
    HIER_ISO = "hier-iso"
    FOLDED3D = "folded3d"


class Normalization(str, Enum):
    UNIT_ENTRIES = "unit-entries"  # independent entries of variance 1
    INVERSE_DIM = "inverse-dim"    # independent entries of variance 1/D


_KIND_CODES = {k: i for i, k in enumerate(EnsembleKind)}


@dataclass(frozen=True)
class EnsembleSpec:
    """Declarative description of which ensemble to sample."""

    kind: EnsembleKind
    dim: int
    half_dim: Optional[int] = None   # flip2d only, dim = 2 * half_dim
    levels: Optional[int] = None     # hier-toy: dim = 4**levels; hier-iso: dim = 2**levels
    folds: Optional[int] = None      # folded3d: orbit size up to 2**folds
    normalization: Normalization = Normalization.INVERSE_DIM

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidSpecError("dim must be a positive integer")
        k = self.kind
        if k == EnsembleKind.FLIP2D:
            if self.half_dim is None or self.half_dim < 1:
                raise InvalidSpecError("flip2d requires half_dim >= 1")
            if self.dim != 2 * self.half_dim:
                raise InvalidSpecError("flip2d requires dim = 2 * half_dim")
        elif k == EnsembleKind.HIER_TOY:
            if self.levels is None or self.levels < 1:
                raise InvalidSpecError("hier-toy requires levels >= 1")
            if self.dim != 4 ** self.levels:
                raise InvalidSpecError("hier-toy requires dim = 4**levels")
        elif k == EnsembleKind.HIER_ISO:
            if self.levels is None or self.levels < 1:
                raise InvalidSpecError("hier-iso requires levels >= 1")
            if self.dim != 2 ** self.levels:
                raise InvalidSpecError("hier-iso requires dim = 2**levels")
        elif k == EnsembleKind.FOLDED3D:
            if self.folds is None or self.folds < 0:
                raise InvalidSpecError("folded3d requires folds >= 0")
            if 2 ** self.folds > self.dim // 2:
                raise InvalidSpecError("folded3d requires 2**folds <= dim/2")

    # -- convenience constructors -------------------------------------------------

    @classmethod
    def gue(cls, dim, normalization=Normalization.INVERSE_DIM):
        return cls(EnsembleKind.GUE, dim, normalization=normalization)

    @classmethod
    def flip2d(cls, half_dim, normalization=Normalization.INVERSE_DIM):
        return cls(EnsembleKind.FLIP2D, 2 * half_dim, half_dim=half_dim,
                   normalization=normalization)

    @classmethod
    def hier_toy(cls, levels, normalization=Normalization.INVERSE_DIM):
        return cls(EnsembleKind.HIER_TOY, 4 ** levels, levels=levels,
                   normalization=normalization)

    @classmethod
    def hier_iso(cls, levels, normalization=Normalization.INVERSE_DIM):
        return cls(EnsembleKind.HIER_ISO, 2 ** levels, levels=levels,
                   normalization=normalization)

    @classmethod
    def folded3d(cls, dim, folds, normalization=Normalization.INVERSE_DIM):
        return cls(EnsembleKind.FOLDED3D, dim, folds=folds,
                   normalization=normalization)


@dataclass(frozen=True)
class Orbit:
    """One group of identified matrix positions, for inspection and tests."""

    tag: str                  # independent-complex | independent-real | zero | shared-diagonal
    positions: np.ndarray     # (n, 2) row/col indices
    level: Optional[int] = None
    group: Optional[int] = None


@dataclass
class OrbitMap:
    """Partition of the matrix positions into independent random variables.

    Strict-upper positions are split into complex orbits (``labels``) plus
    zero-tagged blocks.  Diagonal positions carry one additive real variable
    per level: ``diag_groups[k][i]`` is the group of index i at level k, and
    the sampled diagonal is the sum over levels of the group variables.  For
    single-level ensembles that sum degenerates to one shared or per-entry
    variable.
    """

    dim: int
    rows: np.ndarray
    cols: np.ndarray
    labels: np.ndarray
    n_offdiag: int
    zero_rows: np.ndarray
    zero_cols: np.ndarray
    zero_labels: np.ndarray
    n_zero: int
    diag_groups: tuple = field(default_factory=tuple)

    @property
    def n_diag(self) -> int:
        return sum(int(g.max()) + 1 for g in self.diag_groups)

    @property
    def n_independent(self) -> int:
        """Number of non-zero orbits (independent parameters)."""
        return self.n_offdiag + self.n_diag

    def orbits(self) -> Iterator[Orbit]:
        order = np.argsort(self.labels, kind="stable")
        bounds = np.searchsorted(self.labels[order], np.arange(self.n_offdiag + 1))
        for i in range(self.n_offdiag):
            sel = order[bounds[i]:bounds[i + 1]]
            yield Orbit("independent-complex",
                        np.column_stack([self.rows[sel], self.cols[sel]]))
        zorder = np.argsort(self.zero_labels, kind="stable")
        zbounds = np.searchsorted(self.zero_labels[zorder], np.arange(self.n_zero + 1))
        for i in range(self.n_zero):
            sel = zorder[zbounds[i]:zbounds[i + 1]]
            yield Orbit("zero",
                        np.column_stack([self.zero_rows[sel], self.zero_cols[sel]]))
        idx = np.arange(self.dim)
        for k, g in enumerate(self.diag_groups):
            n_groups = int(g.max()) + 1
            singleton = n_groups == self.dim
            for gid in range(n_groups):
                pos = idx[g == gid]
                tag = "independent-real" if singleton else "shared-diagonal"
                yield Orbit(tag, np.column_stack([pos, pos]), level=k, group=gid)

    def validate(self) -> None:
        """Check the partition: every strict-upper pair exactly once."""
        d = self.dim
        seen = np.zeros((d, d), dtype=np.int32)
        np.add.at(seen, (self.rows, self.cols), 1)
        np.add.at(seen, (self.zero_rows, self.zero_cols), 1)
        upper = np.triu(np.ones((d, d), dtype=bool), 1)
        if not (seen[upper] == 1).all() or seen[~upper].any():
            raise InvalidSpecError("orbit map does not partition the strict upper triangle")
        for g in self.diag_groups:
            if len(g) != d:
                raise InvalidSpecError("diagonal level does not cover the diagonal")


# -- orbit construction per ensemble ------------------------------------------------


def _offdiag_all(dim):
    rows, cols = np.triu_indices(dim, 1)
    return rows.astype(np.int64), cols.astype(np.int64)


def _empty_zero():
    z = np.empty(0, dtype=np.int64)
    return z, z.copy(), z.copy(), 0


def _gue_orbits(dim):
    rows, cols = _offdiag_all(dim)
    labels = np.arange(len(rows))
    zr, zc, zl, nz = _empty_zero()
    return OrbitMap(dim, rows, cols, labels, len(rows), zr, zc, zl, nz,
                    diag_groups=(np.arange(dim),))


def _flip2d_orbits(spec):
    dim = spec.dim
    rows, cols = _offdiag_all(dim)
    pr, pc = dim - 1 - cols, dim - 1 - rows
    key = np.minimum(rows * dim + cols, pr * dim + pc)
    _, labels = np.unique(key, return_inverse=True)
    zr, zc, zl, nz = _empty_zero()
    return OrbitMap(dim, rows, cols, labels, int(labels.max()) + 1, zr, zc, zl, nz,
                    diag_groups=(np.zeros(dim, dtype=np.int64),))


def _hier_toy_zero_blocks(dim):
    """Recursive zero pattern: blocks (1,2) and (3,4) of every 4x4 block grid."""
    blocks = []  # (r0, r1, c0, c1)

    def mark(off, size):
        q = size // 4
        blocks.append((off, off + q, off + q, off + 2 * q))
        blocks.append((off + 2 * q, off + 3 * q, off + 3 * q, off + 4 * q))
        if q >= 4:
            for b in range(4):
                mark(off + b * q, q)

    mark(0, dim)
    return blocks


def _hier_toy_orbits(spec):
    dim, L = spec.dim, spec.levels
    zlab = np.full((dim, dim), -1, dtype=np.int64)
    for i, (r0, r1, c0, c1) in enumerate(_hier_toy_zero_blocks(dim)):
        zlab[r0:r1, c0:c1] = i
    rows, cols = _offdiag_all(dim)
    zmask = zlab[rows, cols] >= 0
    zr, zc = rows[zmask], cols[zmask]
    zl = zlab[zr, zc]
    rows, cols = rows[~zmask], cols[~zmask]
    labels = np.arange(len(rows))
    groups = tuple(np.repeat(np.arange(4 ** k), dim // 4 ** k) for k in range(L + 1))
    return OrbitMap(dim, rows, cols, labels, len(rows),
                    zr, zc, zl, int(zl.max()) + 1 if len(zl) else 0,
                    diag_groups=groups)


def _hier_iso_orbits(spec):
    dim, j = spec.dim, spec.levels
    rows, cols = _offdiag_all(dim)
    band = cols - rows
    # dyadic shell: 2^k x 2^k tiles, large blocks near the diagonal
    k = np.clip(j - 1 - np.floor(np.log2(band)).astype(np.int64), 0, j - 1)
    rt, ct = rows >> k, cols >> k
    tiles_per_row = (dim >> k).astype(np.int64)
    key = (band * dim + rt) * dim + ct
    # image of a tile run under the flip is again a tile run in the same band
    pkey = (band * dim + (tiles_per_row - 1 - ct)) * dim + (tiles_per_row - 1 - rt)
    key = np.minimum(key, pkey)
    _, labels = np.unique(key, return_inverse=True)
    zr, zc, zl, nz = _empty_zero()
    return OrbitMap(dim, rows, cols, labels, int(labels.max()) + 1, zr, zc, zl, nz,
                    diag_groups=(np.zeros(dim, dtype=np.int64),))


def _fold_representatives(length, folds):
    """Dyadic folding of positions 1..length, `folds` times; returns representatives."""
    rep = np.arange(1, length + 1, dtype=np.int64)
    size = length
    for _ in range(folds):
        half = (size + 1) // 2
        rep = np.where(rep > half, size + 1 - rep, rep)
        size = half
    return rep


def _folded3d_orbits(spec):
    dim, folds = spec.dim, spec.folds
    rows_list, cols_list, labels_list = [], [], []
    next_label = 0
    for d in range(1, dim):
        length = dim - d
        rep = _fold_representatives(length, folds)
        uniq, inv = np.unique(rep, return_inverse=True)
        m = np.arange(length, dtype=np.int64)
        rows_list.append(m)
        cols_list.append(m + d)
        labels_list.append(inv + next_label)
        next_label += len(uniq)
    rows = np.concatenate(rows_list)
    cols = np.concatenate(cols_list)
    labels = np.concatenate(labels_list)
    zr, zc, zl, nz = _empty_zero()
    return OrbitMap(dim, rows, cols, labels, next_label, zr, zc, zl, nz,
                    diag_groups=(np.zeros(dim, dtype=np.int64),))


@lru_cache(maxsize=64)
def orbit_map(spec: EnsembleSpec) -> OrbitMap:
    """Materialize the identification pattern of `spec` as an OrbitMap."""
    builders = {
        EnsembleKind.GUE: lambda s: _gue_orbits(s.dim),
        EnsembleKind.FLIP2D: _flip2d_orbits,
        EnsembleKind.HIER_TOY: _hier_toy_orbits,
        EnsembleKind.HIER_ISO: _hier_iso_orbits,
        EnsembleKind.FOLDED3D: _folded3d_orbits,
    }
    return builders[spec.kind](spec)


def independent_parameter_count(spec: EnsembleSpec) -> int:
    return orbit_map(spec).n_independent


# -- sampling ------------------------------------------------------------------------


@dataclass
class HermitianMatrix:
    dim: int
    entries: np.ndarray
    spec: EnsembleSpec
    seed: int
    stream_index: int = 0


def sample(spec: EnsembleSpec, stream: RandomStream) -> HermitianMatrix:
    """Draw one matrix: one Gaussian per orbit, scattered to its positions.

    Draw order is fixed (off-diagonal orbits first, then diagonal levels in
    order), which makes the output a pure function of (spec, stream).
    """
    om = orbit_map(spec)
    gen = stream.generator()
    dim = spec.dim
    scale = 1.0 / np.sqrt(dim) if spec.normalization == Normalization.INVERSE_DIM else 1.0
    z = complex_normals(gen, om.n_offdiag) * scale
    H = np.zeros((dim, dim), dtype=np.complex128)
    H[om.rows, om.cols] = z[om.labels]
    H += H.conj().T
    diag = np.zeros(dim)
    for g in om.diag_groups:
        vals = normals(gen, int(g.max()) + 1) * scale
        diag += vals[g]
    H[np.diag_indices(dim)] = diag
    return HermitianMatrix(dim, H, spec, stream.master_seed, stream.stream_index)


def sample_gue(dim: int, stream: RandomStream,
               normalization=Normalization.INVERSE_DIM) -> HermitianMatrix:
    return sample(EnsembleSpec.gue(dim, normalization), stream)


def sample_flip2d(half_dim: int, stream: RandomStream,
                  normalization=Normalization.INVERSE_DIM) -> HermitianMatrix:
    return sample(EnsembleSpec.flip2d(half_dim, normalization), stream)


def sample_hier_toy(levels: int, stream: RandomStream,
                    normalization=Normalization.INVERSE_DIM) -> HermitianMatrix:
    return sample(EnsembleSpec.hier_toy(levels, normalization), stream)


def sample_hier_iso(levels: int, stream: RandomStream,
                    normalization=Normalization.INVERSE_DIM) -> HermitianMatrix:
    return sample(EnsembleSpec.hier_iso(levels, normalization), stream)


def sample_folded3d(dim: int, folds: int, stream: RandomStream,
                    normalization=Normalization.INVERSE_DIM) -> HermitianMatrix:
    return sample(EnsembleSpec.folded3d(dim, folds, normalization), stream)


# -- binary dump ----------------------------------------------------------------------


def save_matrix(matrix: HermitianMatrix, path) -> None:
    """Little-endian dump: "RMTM", version u32, dim u32, kind u8, then (re, im) f64 pairs."""
    header = struct.pack("<4sIIB", MAGIC, DUMP_VERSION, matrix.dim,
                         _KIND_CODES[matrix.spec.kind])
    payload = np.ascontiguousarray(matrix.entries, dtype="<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def load_matrix(path):
    """Read a dump back; returns (entries, kind, dim)."""
    with open(path, "rb") as fh:
        head = fh.read(struct.calcsize("<4sIIB"))
        magic, version, dim, kind_code = struct.unpack("<4sIIB", head)
        if magic != MAGIC:
            raise InvalidSpecError(f"bad magic {magic!r}")
        if version != DUMP_VERSION:
            raise InvalidSpecError(f"unsupported dump version {version}")
        data = np.frombuffer(fh.read(), dtype="<c16").reshape(dim, dim)
    kind = list(EnsembleKind)[kind_code]
    return data.astype(np.complex128), kind, dim
