"""Backend-agnostic explicit SIMD layer: W-lane vectors, boolean masks, blending.

Every backend realizes the same fixed-width, double-precision lane model:

* ``scalar``      -- W=1, each op is a single numpy scalar operation.  This
                     backend is the correctness baseline for everything else.
* ``emulated{W}`` -- W in {2,4,8,16}, ops are plain C lane loops (numpy
                     ufuncs on a (W,) array) which the compiler may or may
                     not vectorize.

A ``native`` backend name (direct platform vector intrinsics) is reserved but
not built here; ``get_backend("native")`` reports it as unavailable.

All arithmetic is lanewise IEEE-754 double precision, round-to-nearest.
Division by zero and sqrt of negatives produce inf/nan and never trap.
Backends of equal width must agree with the scalar backend bit-for-bit,
lane by lane; ``fma(a, b, c)`` is defined as the two-step ``a*b + c`` (not a
fused multiply-add) so this holds on every backend.  ``reduce_sum`` folds
lanes in ascending order, making it bit-reproducible across backends.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "SimdVec",
    "SimdMask",
    "Backend",
    "BackendUnavailableError",
    "LaneMismatchError",
    "available_backends",
    "get_backend",
    "lane_count",
    "splat",
    "load",
    "store",
    "add",
    "sub",
    "mul",
    "div",
    "fma",
    "sqrt",
    "vabs",
    "vmin",
    "vmax",
    "copysign",
    "cmp_lt",
    "cmp_le",
    "cmp_gt",
    "cmp_ge",
    "cmp_eq",
    "mask_and",
    "mask_or",
    "mask_not",
    "any_lane",
    "all_lanes",
    "no_lane",
    "choose",
    "reduce_sum",
    "reduce_min",
    "reduce_max",
]

_NAN = np.float64("nan")

# numpy warns (but still produces IEEE inf/nan) on divide-by-zero etc.; the
# lane ops must be silent.
_QUIET = {"divide": "ignore", "invalid": "ignore", "over": "ignore", "under": "ignore"}


class BackendUnavailableError(ValueError):
    """Requested backend name is unknown or not built."""


class LaneMismatchError(ValueError):
    """Operands come from different backends or widths."""


class SimdVec:
    """Immutable W-lane vector of float64 values."""

    __slots__ = ("lanes", "backend")

    def __init__(self, lanes, backend: "Backend"):
        arr = np.array(lanes, dtype=np.float64)
        if arr.shape != (backend.width,):
            raise LaneMismatchError(
                f"expected {backend.width} lanes for backend '{backend.name}', got shape {arr.shape}"
            )
        arr.flags.writeable = False
        self.lanes = arr
        self.backend = backend

    @classmethod
    def _wrap(cls, arr: np.ndarray, backend: "Backend") -> "SimdVec":
        # trusted fast path: arr is a fresh (W,) float64 array
        self = object.__new__(cls)
        arr.flags.writeable = False
        self.lanes = arr
        self.backend = backend
        return self

    def __repr__(self):
        return f"SimdVec({self.lanes.tolist()}, backend={self.backend.name!r})"

    def __eq__(self, other):
        return (
            isinstance(other, SimdVec)
            and self.backend is other.backend
            and np.array_equal(self.lanes, other.lanes)
        )

    def __hash__(self):
        return hash((self.backend.name, self.lanes.tobytes()))


class SimdMask:
    """Immutable W-lane boolean mask; companion of SimdVec of equal width."""

    __slots__ = ("lanes", "backend")

    def __init__(self, lanes, backend: "Backend"):
        arr = np.array(lanes, dtype=bool)
        if arr.shape != (backend.width,):
            raise LaneMismatchError(
                f"expected {backend.width} mask lanes for backend '{backend.name}', got shape {arr.shape}"
            )
        arr.flags.writeable = False
        self.lanes = arr
        self.backend = backend

    @classmethod
    def _wrap(cls, arr: np.ndarray, backend: "Backend") -> "SimdMask":
        self = object.__new__(cls)
        arr.flags.writeable = False
        self.lanes = arr
        self.backend = backend
        return self

    def __repr__(self):
        return f"SimdMask({self.lanes.tolist()}, backend={self.backend.name!r})"


def _same(*operands):
    backend = operands[0].backend
    for op in operands[1:]:
        if op.backend is not backend:
            raise LaneMismatchError(
                "mixed operands: "
                + ", ".join(f"'{o.backend.name}' (W={o.backend.width})" for o in operands)
            )
    return backend


class Backend:
    """One realization of the lane model; width is fixed per instance."""

    def __init__(self, name: str, width: int):
        if width < 1 or (width & (width - 1)) != 0:
            raise ValueError(f"lane count must be a power of two, got {width}")
        self.name = name
        self.width = width

    def __repr__(self):
        return f"<{type(self).__name__} {self.name!r} W={self.width}>"

    # -- construction ------------------------------------------------------

    def splat(self, x: float) -> SimdVec:
        return SimdVec._wrap(np.full(self.width, x, dtype=np.float64), self)

    def splat_mask(self, b: bool) -> SimdMask:
        return SimdMask._wrap(np.full(self.width, bool(b), dtype=bool), self)

    def load(self, buffer, offset: int) -> SimdVec:
        buf = np.asarray(buffer, dtype=np.float64)
        if buf.ndim != 1:
            raise ValueError("load requires a contiguous 1-d buffer")
        if offset < 0 or offset + self.width > buf.shape[0]:
            raise IndexError(
                f"load of {self.width} lanes at offset {offset} escapes buffer of {buf.shape[0]}"
            )
        return SimdVec._wrap(buf[offset : offset + self.width].copy(), self)

    def store(self, v: SimdVec, buffer, offset: int) -> None:
        if v.backend is not self:
            raise LaneMismatchError(f"store of '{v.backend.name}' vector via '{self.name}' backend")
        buf = np.asarray(buffer)
        if buf.dtype != np.float64 or buf.ndim != 1:
            raise ValueError("store requires a contiguous 1-d float64 buffer")
        if offset < 0 or offset + self.width > buf.shape[0]:
            raise IndexError(
                f"store of {self.width} lanes at offset {offset} escapes buffer of {buf.shape[0]}"
            )
        buf[offset : offset + self.width] = v.lanes


class ScalarBackend(Backend):
    """W=1 baseline: each operation is one numpy scalar IEEE operation."""

    def __init__(self):
        super().__init__("scalar", 1)

    def _one(self, x) -> SimdVec:
        return SimdVec._wrap(np.array([x], dtype=np.float64), self)

    def add(self, a, b):
        _same(a, b)
        with np.errstate(**_QUIET):
            return self._one(a.lanes[0] + b.lanes[0])

    def sub(self, a, b):
        _same(a, b)
        with np.errstate(**_QUIET):
            return self._one(a.lanes[0] - b.lanes[0])

    def mul(self, a, b):
        _same(a, b)
        with np.errstate(**_QUIET):
            return self._one(a.lanes[0] * b.lanes[0])

    def div(self, a, b):
        _same(a, b)
        with np.errstate(**_QUIET):
            return self._one(a.lanes[0] / b.lanes[0])

    def fma(self, a, b, c):
        # two-step by contract: a*b rounded, then +c rounded
        _same(a, b, c)
        with np.errstate(**_QUIET):
            return self._one(a.lanes[0] * b.lanes[0] + c.lanes[0])

    def sqrt(self, a):
        with np.errstate(**_QUIET):
            return self._one(np.sqrt(a.lanes[0]))

    def abs(self, a):
        return self._one(np.abs(a.lanes[0]))

    def min(self, a, b):
        _same(a, b)
        x, y = a.lanes[0], b.lanes[0]
        if x != x or y != y:
            return self._one(_NAN)
        return self._one(x if x < y else y)

    def max(self, a, b):
        _same(a, b)
        x, y = a.lanes[0], b.lanes[0]
        if x != x or y != y:
            return self._one(_NAN)
        return self._one(x if x > y else y)

    def copysign(self, a, b):
        _same(a, b)
        return self._one(np.copysign(a.lanes[0], b.lanes[0]))

    def _cmp(self, a, b, op):
        _same(a, b)
        x, y = a.lanes[0], b.lanes[0]
        return SimdMask._wrap(np.array([bool(op(x, y))]), self)

    def cmp_lt(self, a, b):
        return self._cmp(a, b, lambda x, y: x < y)

    def cmp_le(self, a, b):
        return self._cmp(a, b, lambda x, y: x <= y)

    def cmp_gt(self, a, b):
        return self._cmp(a, b, lambda x, y: x > y)

    def cmp_ge(self, a, b):
        return self._cmp(a, b, lambda x, y: x >= y)

    def cmp_eq(self, a, b):
        return self._cmp(a, b, lambda x, y: x == y)

    def mask_and(self, m, n):
        _same(m, n)
        return SimdMask._wrap(np.array([m.lanes[0] and n.lanes[0]]), self)

    def mask_or(self, m, n):
        _same(m, n)
        return SimdMask._wrap(np.array([m.lanes[0] or n.lanes[0]]), self)

    def mask_not(self, m):
        return SimdMask._wrap(np.array([not m.lanes[0]]), self)

    def any(self, m):
        return bool(m.lanes[0])

    def all(self, m):
        return bool(m.lanes[0])

    def choose(self, m, a, b):
        if m.backend is not self or a.backend is not self or b.backend is not self:
            raise LaneMismatchError(
                f"choose operands span '{m.backend.name}', '{a.backend.name}', '{b.backend.name}'"
            )
        return self._one(a.lanes[0] if m.lanes[0] else b.lanes[0])

    def reduce_sum(self, a):
        return float(a.lanes[0])

    def reduce_min(self, a):
        return float(a.lanes[0])

    def reduce_max(self, a):
        return float(a.lanes[0])


class EmulatedBackend(Backend):
    """Fixed-width lane-loop backend; each op is one C loop over W lanes."""

    def __init__(self, width: int):
        super().__init__(f"emulated{width}", width)

    def _ufunc2(self, ufunc, a, b):
        _same(a, b)
        with np.errstate(**_QUIET):
            return SimdVec._wrap(ufunc(a.lanes, b.lanes), self)

    def add(self, a, b):
        return self._ufunc2(np.add, a, b)

    def sub(self, a, b):
        return self._ufunc2(np.subtract, a, b)

    def mul(self, a, b):
        return self._ufunc2(np.multiply, a, b)

    def div(self, a, b):
        return self._ufunc2(np.divide, a, b)

    def fma(self, a, b, c):
        _same(a, b, c)
        with np.errstate(**_QUIET):
            return SimdVec._wrap(a.lanes * b.lanes + c.lanes, self)

    def sqrt(self, a):
        with np.errstate(**_QUIET):
            return SimdVec._wrap(np.sqrt(a.lanes), self)

    def abs(self, a):
        return SimdVec._wrap(np.abs(a.lanes), self)

    def min(self, a, b):
        return self._ufunc2(np.minimum, a, b)

    def max(self, a, b):
        return self._ufunc2(np.maximum, a, b)

    def copysign(self, a, b):
        return self._ufunc2(np.copysign, a, b)

    def _cmp(self, ufunc, a, b):
        _same(a, b)
        return SimdMask._wrap(ufunc(a.lanes, b.lanes), self)

    def cmp_lt(self, a, b):
        return self._cmp(np.less, a, b)

    def cmp_le(self, a, b):
        return self._cmp(np.less_equal, a, b)

    def cmp_gt(self, a, b):
        return self._cmp(np.greater, a, b)

    def cmp_ge(self, a, b):
        return self._cmp(np.greater_equal, a, b)

    def cmp_eq(self, a, b):
        return self._cmp(np.equal, a, b)

    def mask_and(self, m, n):
        _same(m, n)
        return SimdMask._wrap(np.logical_and(m.lanes, n.lanes), self)

    def mask_or(self, m, n):
        _same(m, n)
        return SimdMask._wrap(np.logical_or(m.lanes, n.lanes), self)

    def mask_not(self, m):
        return SimdMask._wrap(np.logical_not(m.lanes), self)

    def any(self, m):
        return bool(np.any(m.lanes))

    def all(self, m):
        return bool(np.all(m.lanes))

    def choose(self, m, a, b):
        if m.backend is not self or a.backend is not self or b.backend is not self:
            raise LaneMismatchError(
                f"choose operands span '{m.backend.name}', '{a.backend.name}', '{b.backend.name}'"
            )
        return SimdVec._wrap(np.where(m.lanes, a.lanes, b.lanes), self)

    def reduce_sum(self, a):
        # fixed ascending fold; np.sum would use pairwise order instead
        acc = a.lanes[0]
        for i in range(1, self.width):
            acc = acc + a.lanes[i]
        return float(acc)

    def reduce_min(self, a):
        acc = a.lanes[0]
        for i in range(1, self.width):
            x = a.lanes[i]
            if acc != acc or x != x:
                acc = _NAN
            elif x < acc:
                acc = x
        return float(acc)

    def reduce_max(self, a):
        acc = a.lanes[0]
        for i in range(1, self.width):
            x = a.lanes[i]
            if acc != acc or x != x:
                acc = _NAN
            elif x > acc:
                acc = x
        return float(acc)


_REGISTRY: dict[str, Backend] = {"scalar": ScalarBackend()}
for _w in (2, 4, 8, 16):
    _REGISTRY[f"emulated{_w}"] = EmulatedBackend(_w)


def available_backends() -> tuple[str, ...]:
    """Names of the backends built into this installation."""
    return tuple(_REGISTRY)


def get_backend(backend) -> Backend:
    """Resolve a backend name (or pass through a Backend instance)."""
    if isinstance(backend, Backend):
        return backend
    if backend == "native":
        raise BackendUnavailableError(
            "the 'native' backend is not built in this installation; "
            f"available: {', '.join(available_backends())}"
        )
    try:
        return _REGISTRY[backend]
    except KeyError:
        raise BackendUnavailableError(
            f"unknown backend {backend!r}; available: {', '.join(available_backends())}"
        ) from None


def lane_count(backend) -> int:
    return get_backend(backend).width


# -- free-function forms, dispatching on the operands' backend --------------


def splat(x: float, backend) -> SimdVec:
    return get_backend(backend).splat(x)


def load(buffer, offset: int, backend) -> SimdVec:
    return get_backend(backend).load(buffer, offset)


def store(v: SimdVec, buffer, offset: int) -> None:
    v.backend.store(v, buffer, offset)


def add(a, b):
    return a.backend.add(a, b)


def sub(a, b):
    return a.backend.sub(a, b)


def mul(a, b):
    return a.backend.mul(a, b)


def div(a, b):
    return a.backend.div(a, b)


def fma(a, b, c):
    return a.backend.fma(a, b, c)


def sqrt(a):
    return a.backend.sqrt(a)


def vabs(a):
    return a.backend.abs(a)


def vmin(a, b):
    return a.backend.min(a, b)


def vmax(a, b):
    return a.backend.max(a, b)


def copysign(a, b):
    return a.backend.copysign(a, b)


def cmp_lt(a, b):
    return a.backend.cmp_lt(a, b)


def cmp_le(a, b):
    return a.backend.cmp_le(a, b)


def cmp_gt(a, b):
    return a.backend.cmp_gt(a, b)


def cmp_ge(a, b):
    return a.backend.cmp_ge(a, b)


def cmp_eq(a, b):
    return a.backend.cmp_eq(a, b)


def mask_and(m, n):
    return m.backend.mask_and(m, n)


def mask_or(m, n):
    return m.backend.mask_or(m, n)


def mask_not(m):
    return m.backend.mask_not(m)


def any_lane(m) -> bool:
    return m.backend.any(m)


def all_lanes(m) -> bool:
    return m.backend.all(m)


def no_lane(m) -> bool:
    return not m.backend.any(m)


def choose(m, a, b):
    return m.backend.choose(m, a, b)


def reduce_sum(a) -> float:
    return a.backend.reduce_sum(a)


def reduce_min(a) -> float:
    return a.backend.reduce_min(a)


def reduce_max(a) -> float:
    return a.backend.reduce_max(a)
