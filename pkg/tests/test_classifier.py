"""Steady-state labeling, sweep helpers and the perceptron separability check."""

import math

import numpy as np
import pytest

from qsc.classifier import (
    CouplingOutOfRange,
    EmptyInput,
    Label,
    LabeledPoint,
    UnknownSampler,
    check_linear_separability,
    classify,
    generate_theta_dataset,
    sweep_coupling_pairs,
    sweep_couplings,
    sweep_thetas,
)
from qsc.collision import DEFAULT_SEED, EngineConfig, NoiseSpec, ReservoirSpec, steady_state_oracle

FAST_CFG = EngineConfig(max_collisions=200, tol=1e-4)


def point(features, label):
    return LabeledPoint(tuple(features), 0.0, label, 0, True)


def test_classify_sign_convention():
    up = steady_state_oracle([ReservoirSpec(0.0, 0.1)], EngineConfig())
    down = steady_state_oracle([ReservoirSpec(math.pi, 0.1)], EngineConfig())
    assert classify(up) is Label.CLASS1
    assert classify(down) is Label.CLASS2
    # the boundary itself belongs to class 1
    balanced = steady_state_oracle(
        [ReservoirSpec(0.0, 0.1), ReservoirSpec(math.pi, 0.1)], EngineConfig()
    )
    assert abs(balanced.sigma_z_ss) < 1e-14
    assert classify(balanced) is Label.CLASS1


def test_sweep_couplings_features_and_labels():
    points = sweep_couplings([-0.05, 0.0, 0.05], 0.1, EngineConfig(max_collisions=100000))
    assert [p.label for p in points] == [Label.CLASS2, Label.CLASS1, Label.CLASS1]
    assert points[0].features == (0.0, 0.1)
    assert points[2].features == (0.1, 0.0)
    assert points[1].param_value == 0.0
    assert points[0].sigma_z_ss == pytest.approx(-1.0, abs=1e-4)
    assert points[2].sigma_z_ss == pytest.approx(1.0, abs=1e-4)


def test_sweep_couplings_rejects_out_of_range_delta():
    with pytest.raises(CouplingOutOfRange):
        sweep_couplings([0.06], 0.1, FAST_CFG)
    with pytest.raises(EmptyInput):
        sweep_couplings([], 0.1, FAST_CFG)


def test_sweep_coupling_pairs_rejects_negative():
    with pytest.raises(CouplingOutOfRange):
        sweep_coupling_pairs([(0.1, -0.01)], FAST_CFG)


def test_sweep_thetas_exchange_symmetry():
    # swapping the two reservoir angles cannot change the steady state
    rng = np.random.default_rng(61)
    for _ in range(4):
        t1, t2 = rng.uniform(0.0, math.pi, size=2)
        a, b = sweep_thetas([(t1, t2), (t2, t1)], 0.1, EngineConfig(max_collisions=2000, tol=1e-6))
        assert abs(a.sigma_z_ss - b.sigma_z_ss) < 1e-10
        assert a.phi_scaled == pytest.approx(b.phi_scaled, abs=1e-14)


def test_sweep_thetas_scaled_angle_bookkeeping():
    pts = sweep_thetas([(0.0, math.pi)], 0.1, FAST_CFG)
    assert pts[0].phi_scaled == 0.0
    triple = sweep_thetas([(0.0, 0.0, math.pi)], 0.1, FAST_CFG)
    assert triple[0].phi_scaled is None  # only pairs collapse onto one angle
    assert triple[0].features == (0.0, 0.0, math.pi)


def test_sweep_thetas_noise_is_seed_deterministic():
    noise = NoiseSpec(0.2, 0.05)
    tuples = [(0.4, 2.0), (1.0, 1.0)]
    cfg = EngineConfig(max_collisions=300, tol=1e-12, seed=5)
    a = sweep_thetas(tuples, 0.1, cfg, noise=noise)
    b = sweep_thetas(tuples, 0.1, cfg, noise=noise)
    assert [p.sigma_z_ss for p in a] == [p.sigma_z_ss for p in b]
    c = sweep_thetas(tuples, 0.1, EngineConfig(max_collisions=300, tol=1e-12, seed=6), noise=noise)
    assert any(x.sigma_z_ss != y.sigma_z_ss for x, y in zip(a, c))


def test_generate_theta_dataset_shapes_and_range():
    data = generate_theta_dataset(42, dims=2)
    assert data.shape == (42, 2)
    assert np.all(data >= 0.0) and np.all(data <= math.pi)
    triples = generate_theta_dataset(10, dims=3, sampler="uniform", seed=3)
    assert triples.shape == (10, 3)


def test_generate_theta_dataset_deterministic_in_seed():
    a = generate_theta_dataset(42, seed=DEFAULT_SEED)
    b = generate_theta_dataset(42, seed=DEFAULT_SEED)
    assert np.array_equal(a, b)
    c = generate_theta_dataset(42, seed=DEFAULT_SEED + 1)
    assert not np.array_equal(a, c)


def test_generate_theta_dataset_validation():
    with pytest.raises(EmptyInput):
        generate_theta_dataset(0)
    with pytest.raises(ValueError):
        generate_theta_dataset(5, dims=4)
    with pytest.raises(UnknownSampler):
        generate_theta_dataset(5, sampler="cauchy")


def test_separability_two_blobs():
    rng = np.random.default_rng(77)
    pts = []
    for _ in range(30):
        pts.append(point(rng.normal([2.0, 2.0], 0.3), Label.CLASS1))
        pts.append(point(rng.normal([-2.0, -2.0], 0.3), Label.CLASS2))
    report = check_linear_separability(pts)
    assert report.separable
    assert report.margin > 0.0
    assert np.linalg.norm(report.w) == pytest.approx(1.0, abs=1e-12)
    # every point sits on its own side with at least the reported margin
    for p in pts:
        side = 1.0 if p.label is Label.CLASS1 else -1.0
        signed = side * (np.dot(report.w, p.features) + report.b)
        assert signed >= report.margin - 1e-12


def test_separability_xor_is_not_separable():
    pts = [
        point((0.0, 0.0), Label.CLASS1),
        point((1.0, 1.0), Label.CLASS1),
        point((0.0, 1.0), Label.CLASS2),
        point((1.0, 0.0), Label.CLASS2),
    ]
    report = check_linear_separability(pts, max_iterations=200)
    assert not report.separable
    assert report.iterations == 200
    assert report.w is None and report.b is None
    assert report.margin == 0.0


def test_separability_invariant_under_shift_and_scale():
    rng = np.random.default_rng(13)
    base = []
    for _ in range(20):
        base.append(point(rng.normal([1.0, 0.0], 0.2), Label.CLASS1))
        base.append(point(rng.normal([-1.0, 0.0], 0.2), Label.CLASS2))
    plain = check_linear_separability(base)
    moved = [
        point(1000.0 * np.asarray(p.features) + 500.0, p.label) for p in base
    ]
    transformed = check_linear_separability(moved)
    assert plain.separable and transformed.separable
    for p in moved:
        side = 1.0 if p.label is Label.CLASS1 else -1.0
        assert side * (np.dot(transformed.w, p.features) + transformed.b) > 0.0


def test_separability_single_class_always_splits():
    pts = [point((float(i), float(-i)), Label.CLASS2) for i in range(5)]
    report = check_linear_separability(pts)
    assert report.separable
    assert report.iterations == 0
    assert report.margin >= 1.0 - 1e-12


def test_separability_coincident_points_of_both_classes():
    pts = [point((1.0, 1.0), Label.CLASS1), point((1.0, 1.0), Label.CLASS2)]
    report = check_linear_separability(pts)
    assert not report.separable


def test_separability_empty_input():
    with pytest.raises(EmptyInput):
        check_linear_separability([])
