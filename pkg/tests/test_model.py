import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from deepvekua import basis, fields, model
from deepvekua.errors import DimensionMismatch
from deepvekua.optim import grad_check
from deepvekua.rng import make_rng


def _perturb_heads(m, rng, scale=0.1):
    for b in m.blocks:
        if b.warp is not None:
            b.warp.w_out = scale * rng.standard_normal(b.warp.w_out.shape)
    return m


def test_zero_targets(rng):
    m = model.init_model(1, 2, blocks=3, k=4, hidden=8)
    x = rng.uniform(-1, 1, (40, 2))
    fwd = model.forward_train(m, x, np.zeros(40))
    for w in fwd.solved.weights:
        np.testing.assert_allclose(w, 0.0, atol=1e-12)
    np.testing.assert_allclose(fwd.total_pred, 0.0, atol=1e-12)
    np.testing.assert_allclose(fwd.residual_norms, 0.0, atol=1e-12)


def test_exact_recovery_of_a_basis_column(rng):
    m = model.init_model(4, 2, blocks=1, k=4, hidden=8, lam=1e-12)
    x = rng.uniform(-1, 1, (60, 2))
    psi = basis.vekua_basis(x, m.blocks[0].freqs)  # zero-init warp: zeta = x
    target = psi[:, 5]
    fwd = model.forward_train(m, x, target)
    assert model.mse_of(target - fwd.total_pred) <= 1e-10


def test_mse_matches_last_residual_norm(rng):
    m = _perturb_heads(model.init_model(2, 2, blocks=3, k=4, hidden=6), rng)
    x, y = rng.uniform(-1, 1, (25, 2)), rng.standard_normal(25)
    mse, _, fwd = model.loss_and_grad(m, x, y)
    assert mse == pytest.approx(fwd.residual_norms[-1] ** 2 / 25, rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(0, 2**32 - 1),
    st.sampled_from(sorted(fields.BENCHMARKS)),
    st.sampled_from([1e-12, 1e-6, 1e-2, 10.0]),
)
def test_residual_norms_non_increasing(seed, bench, lam):
    data, _ = fields.generate(bench, seed % 1000, n_train=64)
    m = _perturb_heads(model.init_model(seed, data.d, blocks=5, k=6, hidden=8, lam=lam), np.random.default_rng(seed), 0.5)
    norms = model.forward_train(m, data.x, data.y).residual_norms
    assert np.all(np.diff(norms) <= 0.0), norms


def _loss_fn(m, x, y, mask=None):
    base = model.flatten(m.blocks)

    def f(v):
        if mask is not None:
            v = np.where(mask, v, base)
        mse, grads, _ = model.loss_and_grad(model.unflatten(m, v), x, y)
        g = model.flatten(grads)
        return mse, (g if mask is None else np.where(mask, g, 0.0))

    return f, base


@pytest.mark.parametrize("blocks", [1, 2])
@pytest.mark.parametrize("d", [1, 2])
def test_gradient_matches_finite_differences(rng, blocks, d):
    m = _perturb_heads(model.init_model(int(rng.integers(1 << 30)), d, blocks=blocks, k=3, hidden=5, lam=1e-3), rng)
    x = rng.uniform(-1, 1, (20, d))
    y = np.sin(3 * x[:, 0]) + (x[:, 1] ** 2 if d == 2 else 0.0)
    f, v = _loss_fn(m, x, y)
    report = grad_check(f, v, 1e-6, 1e-4)
    assert report.passed, str(report)


def test_gradient_single_block_frozen_freqs(rng):
    m = _perturb_heads(model.init_model(9, 2, blocks=1, k=4, hidden=6, lam=1e-4), rng)
    x, y = rng.uniform(-1, 1, (30, 2)), rng.standard_normal(30)
    mask = model.trainable_mask(m, train_warp=True, train_freqs=False)
    f, v = _loss_fn(m, x, y, mask)
    report = grad_check(f, v, 1e-6, 1e-4)
    assert report.passed, str(report)
    assert not report.analytic[~mask].any()


def test_gradient_static_cascade(rng):
    m = model.init_model(5, 2, blocks=2, k=4, static=True, lam=1e-4)
    x, y = rng.uniform(-1, 1, (30, 2)), rng.standard_normal(30)
    f, v = _loss_fn(m, x, y)
    assert v.size == 2 * 2 * 4
    assert grad_check(f, v, 1e-6, 1e-4).passed


def test_representable_target_is_stationary(rng):
    m = model.init_model(4, 2, blocks=1, k=3, hidden=4, lam=1e-12)
    x = rng.uniform(-1, 1, (40, 2))
    target = basis.vekua_basis(x, m.blocks[0].freqs) @ rng.standard_normal(12)
    mse, grads, _ = model.loss_and_grad(m, x, target)
    assert mse < 1e-18
    assert np.max(np.abs(model.flatten(grads))) < 1e-7


def test_predict_reproduces_training_prediction_bitwise(rng):
    m = _perturb_heads(model.init_model(3, 2, blocks=3, k=5, hidden=8), rng)
    x, y = rng.uniform(-1, 1, (50, 2)), rng.standard_normal(50)
    fwd = model.forward_train(m, x, y)
    assert model.predict(m, fwd.solved, x).tobytes() == fwd.total_pred.tobytes()


def test_predict_zero_weights(rng):
    m = model.init_model(3, 1, blocks=2, k=5, hidden=8)
    solved = model.SolvedWeights([np.zeros(20), np.zeros(20)], [1e-6, 1e-6])
    assert not model.predict(m, solved, rng.uniform(-1, 1, (9, 1))).any()


def test_predict_shape_checks(rng):
    m = model.init_model(3, 2, blocks=1, k=2, hidden=4)
    with pytest.raises(DimensionMismatch):
        model.predict(m, model.SolvedWeights([np.zeros(8)], [1e-6]), np.zeros((3, 1)))
    with pytest.raises(DimensionMismatch):
        model.predict(m, model.SolvedWeights([np.zeros(7)], [1e-6]), np.zeros((3, 2)))


def test_prediction_is_continuous(rng):
    data, _ = fields.generate("advected_gaussian", 2, n_train=64)
    m = _perturb_heads(model.init_model(2, 2, blocks=2, k=6, hidden=8), rng)
    fwd = model.forward_train(m, data.x, data.y)
    q = 0.5 * (data.x[:1] + data.x[1:2])  # between two training points
    f0 = model.predict(m, fwd.solved, q)[0]
    assert np.isfinite(f0)
    jumps = [abs(model.predict(m, fwd.solved, q + delta)[0] - f0) for delta in (1e-2, 1e-4, 1e-6, 1e-8)]
    assert all(a > b for a, b in zip(jumps, jumps[1:]))
    assert jumps[-1] < 1e-5


def test_static_equivalence(rng):
    deep = model.init_model(12, 2, blocks=3, k=5, hidden=8)
    static = model.init_model(12, 2, blocks=3, k=5, hidden=8, static=True)
    for a, b in zip(deep.blocks, static.blocks):
        np.testing.assert_array_equal(a.freqs, b.freqs)
    x, y = rng.uniform(-1, 1, (40, 2)), rng.standard_normal(40)
    fd, fs = model.forward_train(deep, x, y), model.forward_train(static, x, y)
    q = rng.uniform(-1, 1, (30, 2))
    np.testing.assert_allclose(model.predict(deep, fd.solved, q), model.predict(static, fs.solved, q), rtol=0, atol=1e-12)


def test_init_deterministic():
    a, b = model.init_model(77, 2), model.init_model(77, 2)
    assert model.flatten(a.blocks).tobytes() == model.flatten(b.blocks).tobytes()


def test_flatten_order_and_roundtrip(rng):
    m = model.init_model(make_rng(1), 2, blocks=2, k=3, hidden=4)
    v = model.flatten(m.blocks)
    assert v.size == 2 * (2 * 4 + 4 + 4 * 2 + 2 * 3)
    b0 = m.blocks[0]
    np.testing.assert_array_equal(v[:8], b0.warp.w_in.ravel())
    np.testing.assert_array_equal(v[8:12], b0.warp.b)
    np.testing.assert_array_equal(v[20:23], b0.freqs[:, 0])
    np.testing.assert_array_equal(v[23:26], b0.freqs[:, 1])
    assert model.flatten(model.unflatten(m, v).blocks).tobytes() == v.tobytes()
    with pytest.raises(DimensionMismatch):
        model.unflatten(m, v[:-1])
