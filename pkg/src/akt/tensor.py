"""Dense float64 tensors with reverse-mode automatic differentiation.

The compute graph is the web of parent links recorded as ops run (a
dynamic tape); ``Tensor.backward()`` topologically sorts it and runs each
node's backward rule exactly once, accumulating into ``.grad``. Ops never
mutate their inputs, so one set of read-only parameters can serve several
graphs on different threads; a single graph belongs to one thread.

Every stored value must be finite: constructing a tensor with NaN/Inf
raises ``NonFiniteError`` (that check is what turns silent numerical
blowups into diagnosable failures).
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Callable, Iterable, Sequence

import numpy as np


class ShapeError(ValueError):
    """Operand shapes are incompatible with the requested operation."""


class NonFiniteError(FloatingPointError):
    """A tensor would hold NaN or Inf."""


_grad_enabled = True

# test instrumentation: callables invoked with every freshly created tensor
_creation_hooks: list[Callable[["Tensor"], None]] = []


@contextmanager
def no_grad():
    """Disable graph recording (inference / finite-difference probes)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


def is_grad_enabled() -> bool:
    return _grad_enabled


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward_fn", "_op")

    def __init__(self, data, requires_grad: bool = False):
        arr = np.asarray(data, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError("tensor holds non-finite values")
        self.data = arr
        self.grad: np.ndarray | None = None
        self.requires_grad = bool(requires_grad)
        self._parents: tuple[Tensor, ...] = ()
        self._backward_fn: Callable[[], None] | None = None
        self._op = "leaf"
        for hook in _creation_hooks:
            hook(self)

    # -- graph plumbing ----------------------------------------------------

    @classmethod
    def _node(
        cls,
        data: np.ndarray,
        parents: Sequence["Tensor"],
        backward_fn: Callable[["Tensor"], None],
        op: str,
    ) -> "Tensor":
        """Create an op-output tensor. `backward_fn(out)` must accumulate
        into the parents' grads; it is dropped when grads are off."""
        needs = _grad_enabled and any(p.requires_grad for p in parents)
        out = cls(data, requires_grad=needs)
        out._op = op
        if needs:
            out._parents = tuple(parents)
            out._backward_fn = lambda: backward_fn(out)
        return out

    def _accumulate(self, g: np.ndarray) -> None:
        if self.requires_grad:
            if self.grad is None:
                self.grad = np.zeros_like(self.data)
            self.grad += g

    def backward(self) -> None:
        """Reverse pass from a scalar root; populates grad on every
        reachable tensor with requires_grad."""
        if self.data.size != 1:
            raise ShapeError("backward() requires a scalar root")
        order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in seen:
                    stack.append((p, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node._backward_fn is not None and node.grad is not None:
                node._backward_fn()

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    # -- basics ------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        return float(self.data)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, op={self._op}, grad={self.requires_grad})"

    # -- elementwise arithmetic (numpy broadcasting rules) ------------------

    def __add__(self, other):
        other = _as_tensor(other)

        def bw(out):
            self._accumulate(_unbroadcast(out.grad, self.shape))
            other._accumulate(_unbroadcast(out.grad, other.shape))

        return Tensor._node(self.data + other.data, (self, other), bw, "add")

    __radd__ = __add__

    def __neg__(self):
        def bw(out):
            self._accumulate(-out.grad)

        return Tensor._node(-self.data, (self,), bw, "neg")

    def __sub__(self, other):
        other = _as_tensor(other)

        def bw(out):
            self._accumulate(_unbroadcast(out.grad, self.shape))
            other._accumulate(_unbroadcast(-out.grad, other.shape))

        return Tensor._node(self.data - other.data, (self, other), bw, "sub")

    def __rsub__(self, other):
        return _as_tensor(other) - self

    def __mul__(self, other):
        other = _as_tensor(other)

        def bw(out):
            self._accumulate(_unbroadcast(out.grad * other.data, self.shape))
            other._accumulate(_unbroadcast(out.grad * self.data, other.shape))

        return Tensor._node(self.data * other.data, (self, other), bw, "mul")

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_tensor(other)

        def bw(out):
            self._accumulate(_unbroadcast(out.grad / other.data, self.shape))
            other._accumulate(
                _unbroadcast(-out.grad * self.data / (other.data * other.data), other.shape)
            )

        return Tensor._node(self.data / other.data, (self, other), bw, "div")

    def __rtruediv__(self, other):
        return _as_tensor(other) / self

    def __pow__(self, exponent: float):
        if not np.isscalar(exponent):
            raise ShapeError("pow exponent must be a scalar")
        e = float(exponent)

        def bw(out):
            self._accumulate(out.grad * e * self.data ** (e - 1.0))

        return Tensor._node(self.data**e, (self,), bw, "pow")

    def abs(self):
        # subgradient 0 at x == 0 (np.sign(0) == 0)
        def bw(out):
            self._accumulate(out.grad * np.sign(self.data))

        return Tensor._node(np.abs(self.data), (self,), bw, "abs")

    def exp(self):
        def bw(out):
            self._accumulate(out.grad * out.data)

        return Tensor._node(np.exp(self.data), (self,), bw, "exp")

    def log(self):
        def bw(out):
            self._accumulate(out.grad / self.data)

        return Tensor._node(np.log(self.data), (self,), bw, "log")

    def sqrt(self):
        def bw(out):
            self._accumulate(out.grad * 0.5 / out.data)

        return Tensor._node(np.sqrt(self.data), (self,), bw, "sqrt")

    def sigmoid(self):
        y = _sigmoid(self.data)

        def bw(out):
            self._accumulate(out.grad * out.data * (1.0 - out.data))

        return Tensor._node(y, (self,), bw, "sigmoid")

    def silu(self):
        s = _sigmoid(self.data)

        def bw(out):
            self._accumulate(out.grad * (s * (1.0 + self.data * (1.0 - s))))

        return Tensor._node(self.data * s, (self,), bw, "silu")

    def relu(self):
        def bw(out):
            self._accumulate(out.grad * (self.data > 0.0))

        return Tensor._node(np.maximum(self.data, 0.0), (self,), bw, "relu")

    # -- shape ops -----------------------------------------------------------

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        old = self.shape

        def bw(out):
            self._accumulate(out.grad.reshape(old))

        return Tensor._node(self.data.reshape(shape), (self,), bw, "reshape")

    @property
    def T(self):
        if self.ndim != 2:
            raise ShapeError("T is defined for rank-2 tensors")

        def bw(out):
            self._accumulate(out.grad.T)

        return Tensor._node(self.data.T.copy(), (self,), bw, "transpose")

    def __getitem__(self, key):
        def bw(out):
            g = np.zeros_like(self.data)
            np.add.at(g, key, out.grad)
            self._accumulate(g)

        return Tensor._node(self.data[key].copy(), (self,), bw, "slice")

    # -- matmul / reductions -------------------------------------------------

    def __matmul__(self, other):
        other = _as_tensor(other)
        if self.ndim != 2 or other.ndim != 2:
            raise ShapeError("matmul expects rank-2 operands")
        if self.shape[1] != other.shape[0]:
            raise ShapeError(
                f"matmul inner extents disagree: {self.shape} @ {other.shape}"
            )

        def bw(out):
            self._accumulate(out.grad @ other.data.T)
            other._accumulate(self.data.T @ out.grad)

        return Tensor._node(self.data @ other.data, (self, other), bw, "matmul")

    def sum(self, axis=None, keepdims: bool = False):
        def bw(out):
            g = out.grad
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            self._accumulate(np.broadcast_to(g, self.shape).copy())

        return Tensor._node(self.data.sum(axis=axis, keepdims=keepdims), (self,), bw, "sum")

    def mean(self, axis=None, keepdims: bool = False):
        if axis is None:
            n = self.data.size
        else:
            axes = axis if isinstance(axis, tuple) else (axis,)
            n = int(np.prod([self.shape[a] for a in axes]))

        def bw(out):
            g = out.grad / n
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            self._accumulate(np.broadcast_to(g, self.shape).copy())

        return Tensor._node(
            self.data.mean(axis=axis, keepdims=keepdims), (self,), bw, "mean"
        )

    def max(self, axis=None, keepdims: bool = False):
        if axis is None:
            flat_idx = int(np.argmax(self.data))

            def bw(out):
                g = np.zeros_like(self.data)
                g.flat[flat_idx] = float(out.grad)
                self._accumulate(g)

            return Tensor._node(self.data.max(), (self,), bw, "max")

        idx = np.argmax(self.data, axis=axis)

        def bw_axis(out):
            g = out.grad
            if not keepdims:
                g = np.expand_dims(g, axis)
            buf = np.zeros_like(self.data)
            np.put_along_axis(buf, np.expand_dims(idx, axis), g, axis=axis)
            self._accumulate(buf)

        return Tensor._node(
            self.data.max(axis=axis, keepdims=keepdims), (self,), bw_axis, "max"
        )

    def softmax(self, axis: int = -1):
        """exp-normalize along `axis`, max-subtracted for stability."""
        shifted = self.data - self.data.max(axis=axis, keepdims=True)
        e = np.exp(shifted)
        y = e / e.sum(axis=axis, keepdims=True)

        def bw(out):
            g = out.grad
            dot = (g * out.data).sum(axis=axis, keepdims=True)
            self._accumulate(out.data * (g - dot))

        return Tensor._node(y, (self,), bw, "softmax")


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _as_tensor(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum `grad` down to `shape` (reverse of numpy broadcasting)."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def concat(tensors: Iterable[Tensor], axis: int = 0) -> Tensor:
    parts = [_as_tensor(t) for t in tensors]
    sizes = [p.shape[axis] for p in parts]
    splits = np.cumsum(sizes)[:-1]

    def bw(out):
        for part, g in zip(parts, np.split(out.grad, splits, axis=axis)):
            part._accumulate(g)

    return Tensor._node(
        np.concatenate([p.data for p in parts], axis=axis), parts, bw, "concat"
    )


def zero_grads(params: Iterable[Tensor]) -> None:
    for p in params:
        p.grad = None
