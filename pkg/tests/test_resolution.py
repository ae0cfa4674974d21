import numpy as np
import pytest

from framelab import instances, resolution
from framelab.errors import DimensionMismatchError
from framelab.resolution import OperatorFamily, SumMode


def _raw(seed=0, dim=4, atoms=6):
    return instances.random_resolution_family(dim, atoms, seed)


class TestOperatorFamily:
    def test_rejects_nonsquare_operators(self):
        with pytest.raises(DimensionMismatchError):
            OperatorFamily(
                operators=(np.ones((2, 3)),),
                weights=np.ones(1),
                masses=np.ones(1),
                sum_mode=SumMode.RAW,
            )

    def test_sum_coefficients_by_mode(self):
        fam = _raw(1)
        raw_coeffs = fam.sum_coefficients()
        assert np.allclose(raw_coeffs, 1.0)
        weighted = fam.with_sum_mode(SumMode.WEIGHTED)
        assert np.allclose(
            weighted.sum_coefficients(), fam.weights**2 * fam.masses
        )

    def test_sup_norm_is_max_operator_norm(self):
        fam = _raw(2)
        norms = [np.linalg.norm(t, 2) for t in fam.operators]
        assert fam.sup_norm() == pytest.approx(max(norms), rel=1e-12)


def test_basis_resolution_is_exact():
    fam = resolution.from_orthonormal_basis(4)
    basis_res, probe_res, op_res = resolution.identity_sum_residual(fam)
    assert max(basis_res, probe_res, op_res) == 0.0
    report = resolution.verify_resolution(fam)
    assert report.passed
    assert report.constants["gram_lower"] == pytest.approx(1.0, abs=1e-12)
    assert report.constants["gram_upper"] == pytest.approx(1.0, abs=1e-12)


def test_random_resolution_sums_to_identity():
    for seed in range(5):
        fam = _raw(seed)
        _, _, op_res = resolution.identity_sum_residual(fam)
        assert op_res <= 1e-12
        report = resolution.verify_resolution(fam)
        assert report.passed, report.summary_line()


def test_gram_matches_quadratic_form():
    fam = _raw(3)
    gram = resolution.resolution_gram(fam)
    rng = np.random.default_rng(7)
    for _ in range(5):
        f = rng.standard_normal(fam.ambient_dim)
        assert resolution.gram_sum(fam, f) == pytest.approx(
            float(f @ gram @ f), rel=1e-11
        )


def test_gram_bounds_enclose_probes():
    fam = _raw(4)
    bounds = resolution.resolution_bounds(fam)
    assert bounds.is_resolution()
    rng = np.random.default_rng(8)
    for _ in range(20):
        f = rng.standard_normal(fam.ambient_dim)
        f /= np.linalg.norm(f)
        q = resolution.gram_sum(fam, f)
        assert bounds.lower - 1e-9 <= q <= bounds.upper + 1e-9


def test_verify_resolution_reports_broken_identity():
    fam = _raw(5)
    broken = OperatorFamily(
        operators=tuple(1.5 * t for t in fam.operators),
        weights=fam.weights,
        masses=fam.masses,
        sum_mode=SumMode.RAW,
    )
    report = resolution.verify_resolution(broken)
    assert not report.passed
    assert "identity_sum" in report.failed_hypotheses()


def test_normalize_to_identity_repairs_a_scaled_family():
    fam = _raw(6)
    scaled = OperatorFamily(
        operators=tuple(0.7 * t for t in fam.operators),
        weights=fam.weights,
        masses=fam.masses,
        sum_mode=SumMode.RAW,
    )
    fixed = resolution.normalize_to_identity(scaled)
    _, _, op_res = resolution.identity_sum_residual(fixed)
    assert op_res <= 1e-12


def test_support_is_genuinely_local_on_block_resolutions():
    fam = instances.block_resolution_family(4, 3, 0)
    d = fam.ambient_dim
    f = np.zeros(d)
    f[0] = 1.0  # lives in the first block
    active = resolution.support(fam, f)
    assert 0 < len(active) < fam.natoms
    for i in set(range(fam.natoms)) - set(active):
        assert np.linalg.norm(fam.operators[i] @ f) <= 1e-10


def test_support_of_zero_vector_is_empty():
    fam = _raw(7)
    assert resolution.support(fam, np.zeros(fam.ambient_dim)) == ()
