# This file is part of ts_lcmkit.
#
# Developed for the Vera Rubin Observatory Systems.
# This product includes software developed by the LSST Project
# (https://www.lsst.org).
# See the COPYRIGHT file at the top-level directory of this distribution
# for details of code ownership.
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

__all__ = [
    "Tensor",
    "as_tensor",
    "gradients",
    "matmul",
    "exp",
    "log",
    "absolute",
    "relu",
    "tanh",
    "clip",
    "concatenate",
    "stack",
    "where",
    "logsumexp",
    "log_softmax",
    "softmax",
]

import typing

import numpy as np

from ..errors import ContractError, DimensionError

ArrayLike = typing.Union["Tensor", np.ndarray, float, int]
Backward = typing.Callable[[np.ndarray], tuple[np.ndarray | None, ...]]


class Tensor:
    """Dense 64-bit tensor that records the operations applied to it.

    The operations on tensors that require the gradient build a graph that
    `gradients` traverses in reverse to accumulate the derivatives.

    Parameters
    ----------
    data : `numpy.ndarray`, `float`, or `list`
        Values.
    requires_grad : `bool`, optional
        Track the operations applied to this tensor or not. (the default is
        False)
    name : `str`, optional
        Name used in diagnostics. (the default is "")

    Attributes
    ----------
    data : `numpy.ndarray`
        Values in float64.
    requires_grad : `bool`
        Gradient is tracked or not.
    name : `str`
        Name.
    """

    # Make numpy defer to the reflected operators of Tensor
    __array_priority__ = 100
    __array_ufunc__ = None

    def __init__(
        self,
        data: typing.Any,
        requires_grad: bool = False,
        name: str = "",
    ) -> None:
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.name = name

        self._parents: tuple[Tensor, ...] = tuple()
        self._backward: Backward | None = None

    @classmethod
    def _from_op(
        cls,
        data: np.ndarray,
        parents: tuple["Tensor", ...],
        backward: Backward,
    ) -> "Tensor":
        """Create the tensor as the output of an operation.

        Parameters
        ----------
        data : `numpy.ndarray`
            Output values.
        parents : `tuple` [`Tensor`]
            Inputs of the operation.
        backward : `func`
            Map from the output gradient to the input gradients, in the order
            of the parents.

        Returns
        -------
        `Tensor`
            Output.
        """

        tensor = cls(data)
        if any(parent.requires_grad for parent in parents):
            tensor.requires_grad = True
            tensor._parents = parents
            tensor._backward = backward

        return tensor

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def T(self) -> "Tensor":
        return self.transpose()

    def numpy(self) -> np.ndarray:
        """Copy of the values."""
        return self.data.copy()

    def item(self) -> float:
        """Value of a tensor with one element."""
        return float(self.data)

    def detach(self) -> "Tensor":
        """Tensor with the same values outside of the graph."""
        return Tensor(self.data)

    def __repr__(self) -> str:
        name = f", name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{name})"

    def __len__(self) -> int:
        return len(self.data)

    def __add__(self, other: ArrayLike) -> "Tensor":
        other = as_tensor(other)
        return Tensor._from_op(
            self.data + other.data,
            (self, other),
            lambda grad: (
                _unbroadcast(grad, self.shape),
                _unbroadcast(grad, other.shape),
            ),
        )

    def __radd__(self, other: ArrayLike) -> "Tensor":
        return as_tensor(other) + self

    def __sub__(self, other: ArrayLike) -> "Tensor":
        other = as_tensor(other)
        return Tensor._from_op(
            self.data - other.data,
            (self, other),
            lambda grad: (
                _unbroadcast(grad, self.shape),
                _unbroadcast(-grad, other.shape),
            ),
        )

    def __rsub__(self, other: ArrayLike) -> "Tensor":
        return as_tensor(other) - self

    def __mul__(self, other: ArrayLike) -> "Tensor":
        other = as_tensor(other)
        return Tensor._from_op(
            self.data * other.data,
            (self, other),
            lambda grad: (
                _unbroadcast(grad * other.data, self.shape),
                _unbroadcast(grad * self.data, other.shape),
            ),
        )

    def __rmul__(self, other: ArrayLike) -> "Tensor":
        return as_tensor(other) * self

    def __truediv__(self, other: ArrayLike) -> "Tensor":
        other = as_tensor(other)
        return Tensor._from_op(
            self.data / other.data,
            (self, other),
            lambda grad: (
                _unbroadcast(grad / other.data, self.shape),
                _unbroadcast(-grad * self.data / other.data**2, other.shape),
            ),
        )

    def __rtruediv__(self, other: ArrayLike) -> "Tensor":
        return as_tensor(other) / self

    def __neg__(self) -> "Tensor":
        return Tensor._from_op(-self.data, (self,), lambda grad: (-grad,))

    def __pow__(self, exponent: float) -> "Tensor":
        if isinstance(exponent, Tensor):
            raise TypeError("Only constant exponents are supported.")

        return Tensor._from_op(
            self.data**exponent,
            (self,),
            lambda grad: (grad * exponent * self.data ** (exponent - 1),),
        )

    def __matmul__(self, other: ArrayLike) -> "Tensor":
        return matmul(self, other)

    def __getitem__(self, index: typing.Any) -> "Tensor":
        def _backward(grad: np.ndarray) -> tuple[np.ndarray]:
            full = np.zeros_like(self.data)
            np.add.at(full, index, grad)
            return (full,)

        return Tensor._from_op(self.data[index], (self,), _backward)

    def sum(self, axis: int | tuple[int, ...] | None = None, keepdims: bool = False) -> "Tensor":
        """Sum over the axes."""

        def _backward(grad: np.ndarray) -> tuple[np.ndarray]:
            if axis is not None and not keepdims:
                grad = np.expand_dims(grad, axis)
            return (np.broadcast_to(grad, self.shape).copy(),)

        return Tensor._from_op(self.data.sum(axis=axis, keepdims=keepdims), (self,), _backward)

    def mean(self, axis: int | tuple[int, ...] | None = None, keepdims: bool = False) -> "Tensor":
        """Mean over the axes."""

        if axis is None:
            count = self.size
        else:
            axes = (axis,) if isinstance(axis, int) else axis
            count = int(np.prod([self.shape[idx] for idx in axes]))

        return self.sum(axis=axis, keepdims=keepdims) / count

    def reshape(self, *shape: typing.Any) -> "Tensor":
        """Reshape the tensor."""
        return Tensor._from_op(
            self.data.reshape(*shape),
            (self,),
            lambda grad: (grad.reshape(self.shape),),
        )

    def transpose(self) -> "Tensor":
        """Reverse the axes."""
        return Tensor._from_op(self.data.T, (self,), lambda grad: (grad.T,))

    def square(self) -> "Tensor":
        return self * self

    def exp(self) -> "Tensor":
        return exp(self)

    def log(self) -> "Tensor":
        return log(self)


def as_tensor(value: ArrayLike) -> Tensor:
    """Wrap the value as a constant tensor unless it is a tensor already.

    Parameters
    ----------
    value : `Tensor`, `numpy.ndarray`, or `float`
        Value.

    Returns
    -------
    `Tensor`
        Tensor.
    """
    return value if isinstance(value, Tensor) else Tensor(value)


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum the gradient over the broadcasted axes.

    Parameters
    ----------
    grad : `numpy.ndarray`
        Gradient with the broadcasted shape.
    shape : `tuple`
        Shape of the operand.

    Returns
    -------
    `numpy.ndarray`
        Gradient with the shape of the operand.
    """

    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)

    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)

    return grad


def matmul(left: ArrayLike, right: ArrayLike) -> Tensor:
    """Matrix product of a batch of row vectors and a matrix.

    Parameters
    ----------
    left : `Tensor`
        Tensor with the shape (..., k).
    right : `Tensor`
        Matrix with the shape (k, m).

    Returns
    -------
    `Tensor`
        Tensor with the shape (..., m).

    Raises
    ------
    `DimensionError`
        Inner dimensions do not agree.
    """

    left = as_tensor(left)
    right = as_tensor(right)

    if right.ndim != 2 or left.shape[-1] != right.shape[0]:
        raise DimensionError(f"Can not multiply shapes {left.shape} and {right.shape}.")

    def _backward(grad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        grad_left = grad @ right.data.T
        flat_left = left.data.reshape(-1, left.shape[-1])
        flat_grad = grad.reshape(-1, right.shape[1])
        return grad_left, flat_left.T @ flat_grad

    return Tensor._from_op(left.data @ right.data, (left, right), _backward)


def exp(value: ArrayLike) -> Tensor:
    value = as_tensor(value)
    output = np.exp(value.data)
    return Tensor._from_op(output, (value,), lambda grad: (grad * output,))


def log(value: ArrayLike) -> Tensor:
    value = as_tensor(value)
    return Tensor._from_op(np.log(value.data), (value,), lambda grad: (grad / value.data,))


def absolute(value: ArrayLike) -> Tensor:
    value = as_tensor(value)
    return Tensor._from_op(
        np.abs(value.data),
        (value,),
        lambda grad: (grad * np.sign(value.data),),
    )


def relu(value: ArrayLike) -> Tensor:
    value = as_tensor(value)
    active = value.data > 0.0
    return Tensor._from_op(
        np.where(active, value.data, 0.0),
        (value,),
        lambda grad: (grad * active,),
    )


def tanh(value: ArrayLike) -> Tensor:
    value = as_tensor(value)
    output = np.tanh(value.data)
    return Tensor._from_op(output, (value,), lambda grad: (grad * (1.0 - output**2),))


def clip(value: ArrayLike, minimum: float, maximum: float) -> Tensor:
    """Clip the values. The gradient is zero outside of the interval."""

    value = as_tensor(value)
    inside = (value.data >= minimum) & (value.data <= maximum)
    return Tensor._from_op(
        np.clip(value.data, minimum, maximum),
        (value,),
        lambda grad: (grad * inside,),
    )


def concatenate(tensors: typing.Sequence[ArrayLike], axis: int = -1) -> Tensor:
    """Concatenate the tensors along an existing axis."""

    items = [as_tensor(tensor) for tensor in tensors]
    sizes = [item.shape[axis] for item in items]
    splits = np.cumsum(sizes)[:-1]

    return Tensor._from_op(
        np.concatenate([item.data for item in items], axis=axis),
        tuple(items),
        lambda grad: tuple(np.split(grad, splits, axis=axis)),
    )


def stack(tensors: typing.Sequence[ArrayLike], axis: int = -1) -> Tensor:
    """Stack the tensors along a new axis."""

    items = [as_tensor(tensor) for tensor in tensors]
    return Tensor._from_op(
        np.stack([item.data for item in items], axis=axis),
        tuple(items),
        lambda grad: tuple(np.moveaxis(grad, axis, 0)),
    )


def where(condition: np.ndarray, left: ArrayLike, right: ArrayLike) -> Tensor:
    """Select from left where the constant condition holds, otherwise right."""

    left = as_tensor(left)
    right = as_tensor(right)
    condition = np.asarray(condition, dtype=bool)

    return Tensor._from_op(
        np.where(condition, left.data, right.data),
        (left, right),
        lambda grad: (
            _unbroadcast(np.where(condition, grad, 0.0), left.shape),
            _unbroadcast(np.where(condition, 0.0, grad), right.shape),
        ),
    )


def logsumexp(value: ArrayLike, axis: int = -1, keepdims: bool = False) -> Tensor:
    """Numerically stable log of the sum of exponentials."""

    value = as_tensor(value)
    shift = np.max(value.data, axis=axis, keepdims=True)
    shifted = np.exp(value.data - shift)
    total = shifted.sum(axis=axis, keepdims=True)
    output = np.log(total) + shift

    def _backward(grad: np.ndarray) -> tuple[np.ndarray]:
        if not keepdims:
            grad = np.expand_dims(grad, axis)
        return (grad * shifted / total,)

    if not keepdims:
        output = np.squeeze(output, axis=axis)

    return Tensor._from_op(output, (value,), _backward)


def log_softmax(value: ArrayLike, axis: int = -1) -> Tensor:
    value = as_tensor(value)
    return value - logsumexp(value, axis=axis, keepdims=True)


def softmax(value: ArrayLike, axis: int = -1) -> Tensor:
    return exp(log_softmax(value, axis=axis))


def gradients(loss: Tensor, params: typing.Sequence[Tensor]) -> list[Tensor]:
    """Gradients of a scalar loss by reverse-mode accumulation.

    Parameters
    ----------
    loss : `Tensor`
        Scalar loss with the shape ().
    params : `list` [`Tensor`]
        Parameters.

    Returns
    -------
    `list` [`Tensor`]
        Derivative of the loss with respect to each parameter. Parameters
        the loss does not depend on get zeros.

    Raises
    ------
    `ContractError`
        If the loss is not a scalar.
    """

    if loss.shape != ():
        raise ContractError(f"Loss should be a scalar, got the shape {loss.shape}.")

    # Iterative depth-first search for the reverse topological order
    order: list[Tensor] = list()
    visited: set[int] = set()
    stack_nodes: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack_nodes:
        node, is_expanded = stack_nodes.pop()
        if is_expanded:
            order.append(node)
            continue

        if id(node) in visited:
            continue

        visited.add(id(node))
        stack_nodes.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and id(parent) not in visited:
                stack_nodes.append((parent, False))

    grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    for node in reversed(order):
        grad = grads.get(id(node))
        if grad is None or node._backward is None:
            continue

        for parent, parent_grad in zip(node._parents, node._backward(grad)):
            if parent_grad is None or not parent.requires_grad:
                continue

            if id(parent) in grads:
                grads[id(parent)] = grads[id(parent)] + parent_grad
            else:
                grads[id(parent)] = parent_grad

    return [
        Tensor(grads[id(param)] if id(param) in grads else np.zeros_like(param.data), name=param.name)
        for param in params
    ]
