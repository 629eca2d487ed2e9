"""Periodic basis function sets for the time-varying mean-reversion level.

The drift level is ``L(t) = sum_k mu_k * phi_k(t)``. Every basis set must be
periodic with some period ``v`` and orthogonal over one period with
``int_0^v phi_j phi_k dt = v * delta_jk``. Both properties are checked
numerically when a :class:`BasisSet` is built, unless ``checked=False``.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

BasisFunction = Callable[[NDArray[np.float64]], NDArray[np.float64]]

_CHECK_POINTS = 10_001
_ORTHO_TOL = 1e-6
_PERIOD_TOL = 1e-9


@dataclass(frozen=True)
class BasisSet:
    """A set of ``p`` periodic basis functions with period ``period``.

    Parameters
    ----------
    functions : sequence of callables
        Vectorised evaluators; each maps an array of times to an array of
        values of the same shape.
    period : float
        Period ``v`` shared by all functions.
    name : str
        Label used in result metadata and on the command line.
    checked : bool
        Verify periodicity and orthogonality at construction.
    """

    functions: tuple[BasisFunction, ...]
    period: float
    name: str = "custom"
    checked: bool = field(default=True, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "functions", tuple(self.functions))
        if not self.functions:
            raise ValueError("a basis needs at least one function")
        if not np.isfinite(self.period) or self.period <= 0:
            raise ValueError(f"period must be positive, got {self.period!r}")
        if self.checked:
            _verify(self)

    @property
    def p(self) -> int:
        return len(self.functions)

    def evaluate(self, t: float) -> NDArray[np.float64]:
        """Return ``[phi_1(t), ..., phi_p(t)]``."""
        return self.evaluate_grid(np.array([t], dtype=float))[0]

    def evaluate_grid(self, t: ArrayLike) -> NDArray[np.float64]:
        """Evaluate every function on an array of times; shape ``(len(t), p)``."""
        t = np.asarray(t, dtype=float)
        out = np.empty((t.size, self.p))
        for k, f in enumerate(self.functions):
            out[:, k] = np.broadcast_to(np.asarray(f(t), dtype=float), t.shape)
        return out

    def gram_matrix(self, n_points: int = 100_001) -> NDArray[np.float64]:
        """Composite-trapezoid approximation of ``int_0^v phi_j phi_k dt``."""
        return gram_matrix(self, n_points)


def evaluate(basis: BasisSet, t: float) -> NDArray[np.float64]:
    if t < 0:
        raise ValueError("basis functions are evaluated on t >= 0")
    return basis.evaluate(t)


def gram_matrix(basis: BasisSet, n_points: int = 100_001) -> NDArray[np.float64]:
    if n_points < 100:
        raise ValueError("gram_matrix needs at least 100 quadrature points")
    t = np.linspace(0.0, basis.period, n_points)
    phi = basis.evaluate_grid(t)
    products = phi[:, :, None] * phi[:, None, :]
    g = np.trapezoid(products, t, axis=0)
    return 0.5 * (g + g.T)


def _verify(basis: BasisSet) -> None:
    v = basis.period
    t = np.linspace(0.0, v, 257)
    here = basis.evaluate_grid(t)
    if not np.all(np.isfinite(here)):
        raise ValueError("basis functions must be finite on [0, period]")
    shifted = basis.evaluate_grid(t + v)
    scale = max(1.0, float(np.max(np.abs(here))))
    if np.max(np.abs(shifted - here)) > _PERIOD_TOL * scale:
        raise ValueError(f"basis {basis.name!r} is not {v}-periodic")
    g = gram_matrix(basis, _CHECK_POINTS)
    if np.max(np.abs(g - v * np.eye(basis.p))) > _ORTHO_TOL * v:
        raise ValueError(
            f"basis {basis.name!r} is not orthogonal with norm v over one period"
        )


def _one(t: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.ones_like(t)


@dataclass(frozen=True)
class _Harmonic:
    """``sqrt(2) trig(w t)``; a module-level class so bases can be pickled."""

    w: float
    sine: bool = False

    def __call__(self, t: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.sqrt(2.0) * (np.sin(self.w * t) if self.sine else np.cos(self.w * t))


def make_constant_basis() -> BasisSet:
    """Classical OU level: ``p = 1``, ``phi_1 = 1``, period 1."""
    return BasisSet((_one,), period=1.0, name="constant")


def make_case2_basis(delta_t: float) -> BasisSet:
    """``{1, sqrt(2) cos(pi t / (2 delta_t))}``, period ``4 delta_t``.

    The cosine frequency is tied to the sampling step, so on the grid
    ``t_i = i * delta_t`` the second function cycles through
    ``sqrt(2), 0, -sqrt(2), 0``.
    """
    if not np.isfinite(delta_t) or delta_t <= 0:
        raise ValueError(f"delta_t must be positive, got {delta_t!r}")
    cosine = _Harmonic(np.pi / (2.0 * delta_t))
    return BasisSet((_one, cosine), period=4.0 * delta_t, name="case2")


def make_fourier_basis(period: float, harmonics: int) -> BasisSet:
    """Constant plus ``harmonics`` cosine/sine pairs normalised to norm ``v``."""
    if harmonics < 0:
        raise ValueError("harmonics must be non-negative")
    funcs: list[BasisFunction] = [_one]
    for k in range(1, harmonics + 1):
        w = 2.0 * np.pi * k / period
        funcs.append(_Harmonic(w))
        funcs.append(_Harmonic(w, sine=True))
    return BasisSet(funcs, period=period, name=f"fourier{harmonics}")


def from_name(name: str, delta_t: float, period: float = 1.0,
              harmonics: int = 1) -> BasisSet:
    """Build one of the shipped basis sets by its command-line name."""
    if name == "constant":
        return make_constant_basis()
    if name == "case2":
        return make_case2_basis(delta_t)
    if name == "fourier":
        return make_fourier_basis(period, harmonics)
    raise ValueError(f"unknown basis {name!r}; expected constant, case2 or fourier")


__all__: Sequence[str] = (
    "BasisSet",
    "evaluate",
    "gram_matrix",
    "make_constant_basis",
    "make_case2_basis",
    "make_fourier_basis",
    "from_name",
)
