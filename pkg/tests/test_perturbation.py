import numpy as np
import pytest

from framelab import instances, perturbation, resolution
from framelab.perturbation import PerturbationParams, predicted_interval
from framelab.resolution import OperatorFamily, SumMode


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            PerturbationParams(-0.1, 0.0, (0.0,))
        with pytest.raises(ValueError):
            PerturbationParams(0.0, 1.0, (0.0,))
        with pytest.raises(ValueError):
            PerturbationParams(0.0, 0.0, (-1.0,))

    def test_uniform_and_phi_l2(self):
        params = PerturbationParams.uniform(0.1, 0.2, 0.3, 4)
        assert params.phi == (0.3,) * 4
        masses = np.array([1.0, 4.0, 1.0, 1.0])
        expected = np.sqrt(np.sum(0.09 * masses))
        assert params.phi_l2(masses) == pytest.approx(expected)


def test_check_perturbation_uniform_scaling():
    base, perturbed, params, _ = instances.perturbed_resolution_instance(
        4, 5, 0, "uniform"
    )
    report = perturbation.check_perturbation(base, perturbed, params)
    assert report.passed
    assert any("certificate" in n for n in report.notes)


def test_check_perturbation_detects_violation():
    base = instances.random_resolution_family(3, 4, 1)
    far = OperatorFamily(
        operators=tuple(t + np.eye(3) for t in base.operators),
        weights=base.weights,
        masses=base.masses,
        sum_mode=SumMode.RAW,
    )
    params = PerturbationParams.uniform(0.01, 0.0, 0.0, 4)
    report = perturbation.check_perturbation(base, far, params)
    assert not report.passed


class TestPerturbedSum:
    @pytest.mark.parametrize("kind", ["columns", "left", "scalar"])
    def test_kinds_pass_exhaustively(self, kind):
        for seed in range(4):
            base, perturbed, lam = instances.perturbed_sum_instance(
                4, seed, kind, lam=0.4
            )
            report, total = perturbation.verify_perturbed_sum(
                base, perturbed, lam
            )
            assert report.passed, report.summary_line()
            assert any("exhaustive" in n for n in report.notes)
            # the lemma's norm inference, asserted on the named constants
            assert report.constants["deviation_norm"] <= lam + 1e-9
            assert report.constants["sum_sigma_min"] >= 1.0 - lam - 1e-9
            assert report.constants["reconstruction_residual"] <= 1e-9
            assert total.shape == (4, 4)

    def test_sampled_path_for_many_atoms(self):
        base, perturbed, lam = instances.perturbed_sum_instance(
            13, 0, "scalar", lam=0.3
        )
        report, _ = perturbation.verify_perturbed_sum(
            base, perturbed, lam, nrandom=300
        )
        assert report.passed
        assert any("sampled" in n for n in report.notes)

    def test_violating_subset_is_named(self):
        base = resolution.from_orthonormal_basis(3)
        bad = OperatorFamily(
            operators=tuple(2.5 * t for t in base.operators),
            weights=base.weights,
            masses=base.masses,
            sum_mode=SumMode.RAW,
        )
        report, _ = perturbation.verify_perturbed_sum(base, bad, 0.5)
        assert not report.passed
        assert "subset_domination" in report.failed_hypotheses()

    def test_lam_range_is_validated(self):
        base, perturbed, _ = instances.perturbed_sum_instance(3, 0, "scalar")
        with pytest.raises(ValueError):
            perturbation.verify_perturbed_sum(base, perturbed, 1.0)


class TestPerturbedResolution:
    @pytest.mark.parametrize("kind", ["additive", "left", "uniform"])
    def test_kinds_pass(self, kind):
        for seed in range(4):
            base, perturbed, params, lam = instances.perturbed_resolution_instance(
                4, 6, seed, kind
            )
            report, normalized = perturbation.verify_perturbed_resolution(
                base, perturbed, params, lam
            )
            assert report.passed, report.summary_line()
            assert normalized is not None
            assert (
                report.constants["perturbed_lower"]
                >= report.constants["predicted_raw_lower"] - 1e-9
            )
            assert (
                report.constants["perturbed_upper"]
                <= report.constants["predicted_raw_upper"] + 1e-9
            )

    def test_degenerate_perturbation_reproduces_base_bounds(self):
        base, perturbed, params, lam = instances.perturbed_resolution_instance(
            4, 6, 1, "degenerate"
        )
        report, _ = perturbation.verify_perturbed_resolution(
            base, perturbed, params, lam
        )
        assert report.passed
        bounds = resolution.resolution_bounds(base)
        assert report.constants["predicted_lower"] == pytest.approx(
            bounds.lower, abs=1e-9
        )
        assert report.constants["predicted_upper"] == pytest.approx(
            bounds.upper, abs=1e-9
        )

    def test_side_condition_failure_is_reported(self):
        base, perturbed, _, lam = instances.perturbed_resolution_instance(
            3, 4, 2, "uniform"
        )
        big_phi = PerturbationParams.uniform(0.0, 0.0, 10.0, base.natoms)
        report, _ = perturbation.verify_perturbed_resolution(
            base, perturbed, big_phi, lam
        )
        assert not report.passed
        assert "side_condition" in report.failed_hypotheses()

    def test_lambda1_monotonicity_of_predicted_lower(self):
        # the predicted lower bound can only degrade as lambda1 grows
        lows = [
            predicted_interval(0.5, 2.0, PerturbationParams(l1, 0.1, (0.0,)), 0.0)[0]
            for l1 in np.linspace(0.0, 0.9, 10)
        ]
        assert all(a >= b - 1e-12 for a, b in zip(lows, lows[1:]))


class TestCompositePerturbation:
    def test_scalar_instances_pass(self):
        for seed in range(4):
            base, comp, params, lam = instances.composite_instance(4, 5, seed)
            report = perturbation.verify_composite_perturbation(
                base, comp, params, lam
            )
            assert report.passed, report.summary_line()
            assert report.constants["probe_lower"] ** 2 >= (
                report.constants["predicted_lower"] - 1e-9
            )
            assert any("ignored" in note for note in report.notes)

    def test_identity_pair(self):
        base, comp, params, lam = instances.composite_instance(4, 1, 0, "identity")
        report = perturbation.verify_composite_perturbation(base, comp, params, lam)
        assert report.passed
        # side constant 1 - 0.1 with unit denominator, squared for the Gram
        assert report.constants["predicted_lower"] == pytest.approx(0.81)

    def test_projector_defect_fails_the_side_condition(self):
        base, comp, params, lam = instances.composite_instance(
            4, 5, 0, "projector_defect"
        )
        report = perturbation.verify_composite_perturbation(base, comp, params, lam)
        assert not report.passed
        assert "side_condition" in report.failed_hypotheses()
        # the pointwise inequality itself holds; only the side constant dies
        assert "pointwise_composite" not in report.failed_hypotheses()

    def test_bessel_violation_fails(self):
        base, comp, params, lam = instances.composite_instance(3, 4, 1)
        inflated = OperatorFamily(
            operators=tuple(3.0 * s for s in comp.operators),
            weights=comp.weights,
            masses=comp.masses,
            sum_mode=SumMode.RAW,
        )
        report = perturbation.verify_composite_perturbation(
            base, inflated, params, lam
        )
        assert not report.passed
        assert "bessel_dominated" in report.failed_hypotheses()
