import math

import numpy as np
import pytest

from framelab import fusion, instances, resolution
from framelab.fusion import WeightedSubspaceFamily
from framelab.resolution import OperatorFamily


def test_registry_names_are_stable():
    expected = {
        "axes",
        "mercedes",
        "equiangular",
        "orthogonal_blocks",
        "random_fusion",
        "rotating_line",
        "basis_resolution",
        "random_resolution",
        "block_resolution",
    }
    assert expected <= set(instances.SCENARIOS)


def test_unknown_scenario_lists_known_names():
    with pytest.raises(ValueError, match="mercedes"):
        instances.build_scenario("nope")


@pytest.mark.parametrize("name", sorted(instances.SCENARIOS))
def test_every_scenario_builds(name):
    obj = instances.build_scenario(name, seed=1)
    assert isinstance(obj, (WeightedSubspaceFamily, OperatorFamily))


def test_same_seed_reproduces_the_instance():
    a = instances.random_fusion_family(5, 7, 42)
    b = instances.random_fusion_family(5, 7, 42)
    assert np.array_equal(a.weights, b.weights)
    for x, y in zip(a.subspaces, b.subspaces):
        assert np.array_equal(x.basis, y.basis)
    c = instances.random_fusion_family(5, 7, 43)
    assert not np.array_equal(a.weights, c.weights)


def test_rotating_line_converges_to_the_half_pi_limit():
    entry = instances.get_scenario("rotating_line")
    assert entry.limit_bounds == (math.pi / 2.0, math.pi / 2.0)
    bounds = fusion.frame_bounds(instances.rotating_line_family(64))
    assert bounds.lower == pytest.approx(math.pi / 2.0, abs=1e-6)
    assert bounds.upper == pytest.approx(math.pi / 2.0, abs=1e-6)


def test_rotating_line_single_atom_degenerates():
    bounds = fusion.frame_bounds(instances.rotating_line_family(1))
    assert bounds.lower == pytest.approx(0.0, abs=1e-12)
    assert bounds.upper == pytest.approx(math.pi, abs=1e-12)


def test_orthogonal_blocks_are_tight():
    fam = instances.orthogonal_blocks_family(6, 3, 5)
    bounds = fusion.frame_bounds(fam)
    assert bounds.lower == pytest.approx(1.0, abs=1e-10)
    assert bounds.upper == pytest.approx(1.0, abs=1e-10)


def test_block_resolution_keeps_raw_identity():
    fam = instances.block_resolution_family(5, 3, 2)
    _, _, op_res = resolution.identity_sum_residual(fam)
    assert op_res <= 1e-10


def test_perturbed_resolution_instances_are_admissible():
    # the generated lam must already dominate the worst subset defect
    base, perturbed, params, lam = instances.perturbed_resolution_instance(
        3, 5, 7, "additive"
    )
    assert 0.0 <= lam < 1.0
    assert all(p >= 0.0 for p in params.phi)
    deviation = sum(
        t - s for t, s in zip(base.operators, perturbed.operators)
    )
    total = sum(base.operators)
    defect = np.linalg.norm(deviation @ np.linalg.inv(total), 2)
    assert defect <= lam


def test_composite_instance_side_constant_is_positive():
    for seed in range(3):
        base, comp, params, lam = instances.composite_instance(4, 5, seed)
        d_const = resolution.resolution_bounds(base).upper
        phi_l2 = params.phi_l2(base.masses)
        side = math.sqrt(float(np.sum(base.weights**2 * base.masses)))
        side -= params.lambda1 * math.sqrt(d_const) + phi_l2
        assert side > 0.0
