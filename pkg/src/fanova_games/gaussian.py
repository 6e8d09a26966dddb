"""Gaussian feature distributions, exact polynomial moments and CSV datasets."""

from __future__ import annotations

import csv
import hashlib
import zlib
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Optional, Sequence

import numpy as np

from .coalitions import bits_to_features

PSD_TOLERANCE = 1e-8
SYMMETRY_TOLERANCE = 1e-12
MAX_MOMENT_DEGREE = 8


class NotCovarianceError(ValueError):
    """Matrix is not symmetric positive semi-definite."""


class SingularConditioningError(np.linalg.LinAlgError):
    """Conditioned covariance block is singular and pseudo-inverse mode is off."""


class DatasetError(ValueError):
    """Malformed CSV dataset."""


# --- random streams ----------------------------------------------------------


def _tag_id(tag: str) -> int:
    return zlib.crc32(tag.encode("utf-8"))


def hash_values(values) -> int:
    """Stable 64-bit key for a float vector (used to separate conditioning points)."""
    arr = np.ascontiguousarray(np.asarray(values, dtype=np.float64))
    return int.from_bytes(hashlib.blake2b(arr.tobytes(), digest_size=8).digest(), "little")


def stream(seed: int, tag: str, *keys: int) -> np.random.Generator:
    """Counter-based generator for the stream ``(seed, tag, *keys)``.

    Streams with distinct identifiers are statistically independent, and the
    same identifier always reproduces the same draws regardless of call order.
    """
    seed = int(seed) & (2**64 - 1)
    entropy = [seed & 0xFFFFFFFF, seed >> 32, _tag_id(tag), *(int(k) & (2**64 - 1) for k in keys)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


# --- specs -------------------------------------------------------------------


def cholesky_factor(sigma) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == sigma``.

    Singular PSD matrices get zero columns where the residual pivot vanishes.

    Raises:
        NotCovarianceError: if ``sigma`` is not symmetric or has a pivot below
            ``-1e-8``.
    """
    A = np.array(sigma, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotCovarianceError(f"covariance must be square, got shape {A.shape}")
    if not np.allclose(A, A.T, atol=SYMMETRY_TOLERANCE, rtol=0):
        raise NotCovarianceError("covariance is not symmetric")
    try:
        return np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        pass
    d = A.shape[0]
    L = np.zeros_like(A)
    scale = max(float(np.max(np.abs(np.diag(A)))), 1.0) if d else 1.0
    for j in range(d):
        pivot = A[j, j] - L[j, :j] @ L[j, :j]
        if pivot < -PSD_TOLERANCE:
            raise NotCovarianceError(f"matrix is indefinite (pivot {pivot:.3g} at index {j})")
        if pivot <= 1e-14 * scale:
            continue
        L[j, j] = np.sqrt(pivot)
        L[j + 1 :, j] = (A[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    if not np.allclose(L @ L.T, A, atol=1e-8 * scale, rtol=0):
        raise NotCovarianceError("matrix is not positive semi-definite")
    return L


@dataclass(frozen=True, eq=False)
class GaussianSpec:
    """Multivariate normal ``N(mu, sigma)``."""

    mu: np.ndarray
    sigma: np.ndarray
    degenerate: bool = field(default=False, compare=False)

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        sigma = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        if sigma.shape != (mu.size, mu.size):
            raise NotCovarianceError(
                f"covariance shape {sigma.shape} does not match mean length {mu.size}"
            )
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "_chol", cholesky_factor(sigma) if mu.size else np.zeros((0, 0)))

    @property
    def d(self) -> int:
        return self.mu.size

    @property
    def cholesky(self) -> np.ndarray:
        return self._chol

    @classmethod
    def equicorrelated(cls, d: int, rho: float, mu=None) -> "GaussianSpec":
        """Unit variances and constant correlation ``rho``."""
        if d > 1 and not -1.0 / (d - 1) <= rho <= 1.0:
            raise NotCovarianceError(f"rho={rho} is not a valid equicorrelation for d={d}")
        sigma = np.full((d, d), float(rho))
        np.fill_diagonal(sigma, 1.0)
        return cls(np.zeros(d) if mu is None else mu, sigma)

    @classmethod
    def standard(cls, d: int) -> "GaussianSpec":
        return cls(np.zeros(d), np.eye(d))

    def marginal(self, idx: Sequence[int]) -> "GaussianSpec":
        """Marginal over 0-based coordinates ``idx``."""
        idx = np.asarray(idx, dtype=int)
        return GaussianSpec(self.mu[idx], self.sigma[np.ix_(idx, idx)])

    def is_diagonal(self, tol: float = 0.0) -> bool:
        off = self.sigma - np.diag(np.diag(self.sigma))
        return bool(np.all(np.abs(off) <= tol))


def sample(spec: GaussianSpec, n: int, seed: int, tag: str = "sample") -> np.ndarray:
    """``n`` draws ``mu + L z``; identical ``(spec, n, seed, tag)`` gives identical output."""
    if n == 0:
        return np.zeros((0, spec.d))
    z = stream(seed, tag).standard_normal((n, spec.d))
    return spec.mu + z @ spec.cholesky.T


@dataclass(frozen=True, eq=False)
class ConditionalMap:
    """Affine map ``x_S -> E[X_{-S} | x_S]`` together with the conditional covariance."""

    given: np.ndarray  # 0-based indices in S
    rest: np.ndarray  # 0-based indices in -S
    mu_given: np.ndarray
    mu_rest: np.ndarray
    gain: np.ndarray  # |rest| x |given|
    cov: np.ndarray
    degenerate: bool

    def mean(self, x_given) -> np.ndarray:
        x = np.asarray(x_given, dtype=float)
        return self.mu_rest + (x - self.mu_given) @ self.gain.T


def conditional_map(spec: GaussianSpec, S_bits: int, pseudo_inverse: bool = False) -> ConditionalMap:
    """Schur-complement conditioning on the coordinates in ``S_bits``."""
    given = np.array([i - 1 for i in bits_to_features(S_bits)], dtype=int)
    rest = np.array([i for i in range(spec.d) if not S_bits >> i & 1], dtype=int)
    s_ss = spec.sigma[np.ix_(given, given)]
    s_rs = spec.sigma[np.ix_(rest, given)]
    s_rr = spec.sigma[np.ix_(rest, rest)]
    degenerate = False
    if given.size:
        eig = np.linalg.eigvalsh(s_ss)
        if eig[0] <= 1e-12 * max(eig[-1], 1.0):
            if not pseudo_inverse:
                raise SingularConditioningError("conditioned covariance block is singular")
            degenerate = True
            gain = s_rs @ np.linalg.pinv(s_ss, hermitian=True)
        else:
            gain = np.linalg.solve(s_ss, s_rs.T).T
    else:
        gain = np.zeros((rest.size, 0))
    cov = s_rr - gain @ s_rs.T
    cov = 0.5 * (cov + cov.T)
    return ConditionalMap(given, rest, spec.mu[given], spec.mu[rest], gain, cov, degenerate)


def conditional(spec: GaussianSpec, S_bits: int, x_S, pseudo_inverse: bool = False) -> GaussianSpec:
    """Distribution of ``X_{-S}`` given ``X_S = x_S``.

    Raises:
        SingularConditioningError: singular ``sigma_SS`` without ``pseudo_inverse``.
    """
    cmap = conditional_map(spec, S_bits, pseudo_inverse)
    x_S = np.asarray(x_S, dtype=float)
    if x_S.shape != (cmap.given.size,):
        raise ValueError(f"expected {cmap.given.size} conditioning values, got shape {x_S.shape}")
    return GaussianSpec(cmap.mean(x_S), cmap.cov, degenerate=cmap.degenerate)


# --- exact moments (Isserlis / Wick) ----------------------------------------


@lru_cache(maxsize=None)
def _pairings(indices: tuple[int, ...]) -> tuple[tuple[tuple[int, int], ...], ...]:
    """All perfect matchings of a multiset of indices (as index pairs)."""
    if not indices:
        return ((),)
    first, rest = indices[0], indices[1:]
    out = []
    for k in range(len(rest)):
        pair = (first, rest[k])
        for tail in _pairings(rest[:k] + rest[k + 1 :]):
            out.append((pair,) + tail)
    return tuple(out)


def centered_moment(cov: np.ndarray, kappa: Sequence[int]) -> float:
    """``E[prod Z_i**kappa_i]`` for ``Z ~ N(0, cov)`` via Wick pairings."""
    indices = tuple(i for i, k in enumerate(kappa) for _ in range(int(k)))
    if len(indices) % 2:
        return 0.0
    total = 0.0
    for pairing in _pairings(indices):
        prod = 1.0
        for a, b in pairing:
            prod *= cov[a, b]
        total += prod
    return total


def raw_moments(mean_rows, cov: np.ndarray, kappa: Sequence[int], cache: Optional[dict] = None) -> np.ndarray:
    """``E[prod X_i**kappa_i]`` for ``X ~ N(m, cov)`` at every mean row ``m``.

    Expands ``X = m + Z`` binomially and applies Wick's theorem to the centred
    part. ``cache`` memoises centred moments across calls sharing ``cov``.
    """
    M = np.atleast_2d(np.asarray(mean_rows, dtype=float))
    kappa = tuple(int(k) for k in kappa)
    if sum(kappa) > MAX_MOMENT_DEGREE:
        raise ValueError(f"moment degree {sum(kappa)} exceeds cap {MAX_MOMENT_DEGREE}")
    out = np.zeros(M.shape[0])
    active = [i for i, k in enumerate(kappa) if k]
    for js in np.ndindex(*(kappa[i] + 1 for i in active)):
        j = [0] * len(kappa)
        weight = 1.0
        for pos, i in enumerate(active):
            j[i] = js[pos]
            weight *= comb(kappa[i], js[pos])
        if sum(j) % 2:
            continue
        key = tuple(j)
        if cache is not None and key in cache:
            cm = cache[key]
        else:
            cm = centered_moment(cov, key)
            if cache is not None:
                cache[key] = cm
        if cm == 0.0:
            continue
        term = np.full(M.shape[0], weight * cm)
        for i in active:
            p = kappa[i] - j[i]
            if p:
                term = term * M[:, i] ** p
        out += term
    return out


def gaussian_moment(spec: GaussianSpec, kappa: Sequence[int]) -> float:
    """Exact ``E[prod X_i**kappa_i]`` for total degree at most 8."""
    kappa = tuple(int(k) for k in kappa)
    if len(kappa) != spec.d:
        raise ValueError(f"exponent vector has length {len(kappa)}, expected {spec.d}")
    if any(k < 0 for k in kappa):
        raise ValueError("exponents must be non-negative")
    return float(raw_moments(spec.mu[None, :], spec.sigma, kappa)[0])


# --- datasets ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature rows with optional labels."""

    x: np.ndarray
    y: Optional[np.ndarray] = None
    column_names: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.x, dtype=float))
        if x.shape[0] < 1:
            raise DatasetError("dataset must contain at least one row")
        if not np.all(np.isfinite(x)):
            raise DatasetError("dataset entries must be finite")
        object.__setattr__(self, "x", x)
        if self.y is not None:
            y = np.asarray(self.y, dtype=float).ravel()
            if y.shape[0] != x.shape[0]:
                raise DatasetError(f"labels have length {y.shape[0]}, expected {x.shape[0]}")
            if not np.all(np.isfinite(y)):
                raise DatasetError("labels must be finite")
            object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_dataset(path) -> Dataset:
    """Read a comma-separated file with a header row.

    Feature columns map to ``x1..xd`` by position; a final column named ``y``
    becomes the labels.

    Raises:
        DatasetError: missing header, ragged rows, or non-numeric cells (the
            message names the 1-based row and the column).
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows:
        raise DatasetError(f"{path}: file is empty")
    header = [c.strip() for c in rows[0]]
    if all(_is_number(c) for c in header):
        raise DatasetError(f"{path}: missing header row")
    width = len(header)
    has_y = header[-1].lower() == "y"
    values = []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise DatasetError(f"{path}: row {r} has {len(row)} cells, expected {width}")
        parsed = []
        for c, cell in enumerate(row):
            try:
                parsed.append(float(cell.strip()))
            except ValueError:
                raise DatasetError(
                    f"{path}: non-numeric value {cell!r} at row {r}, column {c + 1} ({header[c]})"
                ) from None
        values.append(parsed)
    if not values:
        raise DatasetError(f"{path}: no data rows")
    arr = np.array(values, dtype=float)
    if has_y:
        return Dataset(arr[:, :-1], arr[:, -1], tuple(header[:-1]))
    return Dataset(arr, None, tuple(header))
