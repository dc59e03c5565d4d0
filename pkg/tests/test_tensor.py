"""Autodiff engine: op semantics, backward rules, graph behavior."""

import numpy as np
import pytest

from akt.gradcheck import grad_check
from akt.tensor import NonFiniteError, ShapeError, Tensor, concat, no_grad


def test_matmul_identity():
    b = Tensor([[1.0, 2.0], [3.0, 4.0]])
    out = Tensor(np.eye(2)) @ b
    np.testing.assert_array_equal(out.data, b.data)


def test_matmul_annihilation():
    out = Tensor(np.zeros((3, 4))) @ Tensor(np.arange(8.0).reshape(4, 2))
    np.testing.assert_array_equal(out.data, np.zeros((3, 2)))


def test_matmul_manual_value():
    # hand arithmetic: [[1*5+2*7, 1*6+2*8], [3*5+4*7, 3*6+4*8]]
    a = Tensor([[1.0, 2.0], [3.0, 4.0]])
    b = Tensor([[5.0, 6.0], [7.0, 8.0]])
    np.testing.assert_array_equal((a @ b).data, [[19.0, 22.0], [43.0, 50.0]])


def test_matmul_shape_mismatch():
    with pytest.raises(ShapeError):
        Tensor(np.zeros((2, 3))) @ Tensor(np.zeros((2, 3)))


def test_sigmoid_symmetry():
    assert Tensor([0.0]).sigmoid().data[0] == 0.5


def test_abs_value_and_subgradient():
    x = Tensor([-3.0], requires_grad=True)
    y = x.abs().sum()
    y.backward()
    assert y.item() == 3.0
    assert x.grad[0] == -1.0
    # subgradient 0 exactly at the kink
    z = Tensor([0.0], requires_grad=True)
    z.abs().sum().backward()
    assert z.grad[0] == 0.0


def test_add_broadcast_values():
    out = Tensor([1.0, 2.0]) + Tensor([3.0, 4.0])
    np.testing.assert_array_equal(out.data, [4.0, 6.0])


def test_sum_and_mean():
    assert Tensor([1.0, 2.0, 3.0]).sum().item() == 6.0
    const = Tensor(np.full((4, 5), 2.5))
    np.testing.assert_array_equal(const.mean(axis=0).data, np.full(5, 2.5))


def test_max_routes_gradient_to_argmax():
    x = Tensor([-1.0, 5.0, 2.0], requires_grad=True)
    m = x.max()
    assert m.item() == 5.0
    m.backward()
    np.testing.assert_array_equal(x.grad, [0.0, 1.0, 0.0])
    # finite-difference agreement away from ties
    x2 = Tensor([-1.0, 5.0, 2.0], requires_grad=True)
    rep = grad_check(lambda: (x2.max() * 3.0), [x2])
    assert rep.passed


def test_softmax_uniform_and_stability():
    np.testing.assert_allclose(Tensor([0.0, 0.0, 0.0]).softmax().data, np.full(3, 1 / 3))
    big = Tensor([1000.0, 0.0]).softmax().data
    assert np.isfinite(big).all() and big[0] > 0.999999 and big[1] < 1e-6


def test_softmax_direct_evaluation():
    # exp-normalize by hand: e = exp(1), [1/(1+e), e/(1+e)]
    e = np.exp(1.0)
    np.testing.assert_allclose(
        Tensor([1.0, 2.0]).softmax().data, [1 / (1 + e), e / (1 + e)], rtol=1e-15
    )


def test_shared_subexpression_accumulates():
    x = Tensor([3.0], requires_grad=True)
    y = (x + x).sum()
    y.backward()
    assert x.grad[0] == 2.0


def test_forward_is_pure():
    rng = np.random.default_rng(7)
    x = Tensor(rng.normal(size=(6, 6)))
    a = (x.silu().softmax(axis=1) @ x.T).sum(axis=0)
    b = (x.silu().softmax(axis=1) @ x.T).sum(axis=0)
    assert np.array_equal(a.data, b.data)


def test_nonfinite_rejected():
    with pytest.raises(NonFiniteError):
        Tensor([np.inf])
    with pytest.raises(NonFiniteError):
        Tensor([[1.0, np.nan]])


def test_backward_needs_scalar():
    with pytest.raises(ShapeError):
        Tensor([[1.0, 2.0]], requires_grad=True).backward()


def test_no_grad_suppresses_graph():
    x = Tensor([1.0], requires_grad=True)
    with no_grad():
        y = x * 2.0
    assert not y.requires_grad


def test_gradcheck_quadratic():
    x = Tensor([3.0], requires_grad=True)
    rep = grad_check(lambda: (x * x).sum(), [x])
    assert rep.passed
    x.grad = None
    (x * x).sum().backward()
    assert abs(x.grad[0] - 6.0) < 1e-12


def test_gradcheck_matmul_closed_form():
    # d/dA sum(A@B) = column-sums of B broadcast across rows
    rng = np.random.default_rng(3)
    a = Tensor(rng.normal(size=(3, 4)), requires_grad=True)
    b = Tensor(rng.normal(size=(4, 2)))
    (a @ b).sum().backward()
    np.testing.assert_allclose(a.grad, np.tile(b.data.sum(axis=1), (3, 1)), rtol=1e-12)
    rep = grad_check(lambda: (a @ b).sum(), [a])
    assert rep.passed


def test_gradcheck_eps_bounds():
    x = Tensor([1.0], requires_grad=True)
    with pytest.raises(ValueError):
        grad_check(lambda: (x * x).sum(), [x], eps=1e-2)


OPS = {
    "add": lambda x, w: (x + w * 2.0).sum(),
    "mul": lambda x, w: (x * w).sum(),
    "div": lambda x, w: (x / (w.abs() + 1.5)).sum(),
    "pow": lambda x, w: ((x * x + 0.5) ** 1.7).sum(),
    "abs": lambda x, w: (x.abs() * w).sum(),
    "exp": lambda x, w: (x.exp() * w).sum(),
    "log": lambda x, w: ((x * x + 0.7).log()).sum(),
    "sqrt": lambda x, w: ((x * x + 0.3).sqrt()).sum(),
    "sigmoid": lambda x, w: (x.sigmoid() * w).sum(),
    "silu": lambda x, w: (x.silu() * w).sum(),
    "relu": lambda x, w: (x.relu() * w).sum(),
    "matmul": lambda x, w: (x.reshape(10, 10) @ w.reshape(10, 10)).sum(),
    "softmax": lambda x, w: (x.reshape(10, 10).softmax(axis=1) * w.reshape(10, 10)).sum(),
    "sum_axis": lambda x, w: (x.reshape(10, 10).sum(axis=0) * w.reshape(10, 10)[0]).sum(),
    "mean_axis": lambda x, w: (x.reshape(10, 10).mean(axis=1) * w.reshape(10, 10)[:, 0]).sum(),
    "max_axis": lambda x, w: (x.reshape(10, 10).max(axis=1) * w.reshape(10, 10)[:, 1]).sum(),
    "slice": lambda x, w: (x.reshape(10, 10)[2:7, ::2] * w.reshape(10, 10)[2:7, ::2]).sum(),
    "concat": lambda x, w: concat([x.reshape(10, 10), x.reshape(10, 10) * 2.0], axis=1).sum(),
    "transpose": lambda x, w: (x.reshape(10, 10).T @ w.reshape(10, 10)).sum(),
    "reduce_all_mean": lambda x, w: (x * w).mean(),
}


@pytest.mark.parametrize("name", sorted(OPS))
def test_op_gradients_at_100_random_points(name):
    # 100 entries probed per op, eps=1e-5, float64, tolerance 1e-4
    rng = np.random.default_rng(hash(name) % 2**32)
    x = Tensor(rng.normal(size=100) * 1.3 + 0.05, requires_grad=True)
    w = Tensor(rng.normal(size=100))
    rep = grad_check(lambda: OPS[name](x, w), [x], eps=1e-5, tolerance=1e-4)
    assert rep.n_probes == 100
    assert rep.passed, f"{name}: max rel err {rep.max_rel_error:.3e}"
