"""Shared numerical kernels: central differences, fixed-step RK4, winding."""

from dataclasses import dataclass, field

import numpy as np

from .errors import Blowup, NonFiniteSample, UndersampledCurve

EPS = np.finfo(float).eps

# central-difference weights for offsets (1, 2, ...) ; antisymmetric stencils
_WEIGHTS = {
    2: ((1, 0.5),),
    4: ((1, 2.0 / 3.0), (2, -1.0 / 12.0)),
}


@dataclass(frozen=True)
class FDScheme:
    """Central finite-difference scheme.

    ``step`` is a relative scale: the actual step at ``x`` is
    ``step * max(1, |x|)``. When ``step`` is None the truncation/rounding
    balanced default ``eps**(1/(order+1))`` is used.
    """

    step: float = None
    order: int = 4

    def __post_init__(self):
        if self.order not in _WEIGHTS:
            raise ValueError(f"order must be 2 or 4, got {self.order}")
        if self.step is not None and not 0 < self.step < 1:
            raise ValueError(f"step must lie in (0, 1), got {self.step}")

    @property
    def rel_step(self):
        if self.step is not None:
            return self.step
        return EPS ** (1.0 / (self.order + 1))

    def h(self, x):
        return self.rel_step * max(1.0, abs(x))


DEFAULT_FD = FDScheme()


def _check(value):
    value = np.asarray(value)
    if not np.all(np.isfinite(value)):
        raise NonFiniteSample(f"non-finite sample: {value!r}")
    return value


def derivative_fd(f, x, scheme=DEFAULT_FD):
    """Central-difference estimate of ``f'(x)``.

    ``f`` may return a scalar or an array (real or complex); the result has
    the same shape.
    """
    h = scheme.h(x)
    acc = 0.0
    for k, w in _WEIGHTS[scheme.order]:
        acc = acc + w * (_check(f(x + k * h)) - _check(f(x - k * h)))
    return acc / h


def partial_fd(f, x, i, scheme=DEFAULT_FD):
    """Partial derivative of ``f`` with respect to component ``i`` of ``x``."""
    x = np.asarray(x, dtype=float)

    def along(t):
        y = x.copy()
        y[i] = t
        return f(y)

    return derivative_fd(along, x[i], scheme)


def jacobian_fd(f, x, scheme=DEFAULT_FD):
    """Stack of partials; result has shape ``f(x).shape + (len(x),)``."""
    x = np.asarray(x, dtype=float)
    cols = [np.asarray(partial_fd(f, x, i, scheme)) for i in range(x.size)]
    return np.stack(cols, axis=-1)


@dataclass(frozen=True)
class ODEState:
    s: float
    y: np.ndarray = field(repr=False)

    def __post_init__(self):
        y = np.array(self.y, dtype=float)
        if not np.all(np.isfinite(y)):
            raise Blowup(self.s)
        object.__setattr__(self, "y", y)


def integrate_rk4(f, y0, s_end, step):
    """Classical RK4 on a uniform grid from ``y0.s`` to ``s_end``.

    The number of steps is ``ceil(|s_end - s0| / step)`` so the grid lands
    exactly on ``s_end``. Integration backwards in ``s`` is allowed.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    s0 = float(y0.s)
    span = float(s_end) - s0
    if span == 0:
        return ODEState(s0, y0.y.copy())
    n = int(np.ceil(abs(span) / step - 1e-9))
    h = span / n
    y = y0.y.copy()
    s = s0
    for k in range(n):
        k1 = f(s, y)
        k2 = f(s + h / 2, y + h / 2 * k1)
        k3 = f(s + h / 2, y + h / 2 * k2)
        k4 = f(s + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        s = s0 + (k + 1) * h
        if not np.all(np.isfinite(y)):
            raise Blowup(s)
    return ODEState(float(s_end), y)


def unwrap(angles, period):
    """Unwrap an angle sequence given modulo ``period``.

    Raises UndersampledCurve when a raw gap, reduced to the nearest
    representative, is not strictly below half a period.
    """
    a = np.asarray(angles, dtype=float)
    if a.size < 2:
        return a.copy()
    raw = np.diff(a)
    gaps = raw - period * np.round(raw / period)
    if np.any(np.abs(gaps) >= period / 2 * (1 - 1e-12)):
        raise UndersampledCurve(
            f"angle gap {np.max(np.abs(gaps)):.3g} reaches half the period {period:.3g}")
    return np.concatenate([[a[0]], a[0] + np.cumsum(gaps)])


def winding_number(angles, period=2 * np.pi):
    """Total unwrapped change of ``angles`` divided by ``period``.

    For a closed curve pass the samples with the first one repeated at the
    end. With ``period = pi`` this counts turns of an undirected line field.
    """
    u = unwrap(angles, period)
    return float((u[-1] - u[0]) / period)
