"""Acceptance suite: ten end-to-end criteria, one printed line each.

Every criterion draws its randomness from a fixed seed, so reruns are
bit-for-bit identical. Timing budgets are asserted where stated.
"""
import json
import math
import time

import numpy as np

from framelab import cli, fusion, instances, perturbation, resolution, serialize, theorems

MASTER_SEED = 20260816


def _line(capsys, idx, desc, ok, extra=""):
    suffix = f" ({extra})" if extra else ""
    with capsys.disabled():
        print(f"ACCEPTANCE {idx:02d} {'PASS' if ok else 'FAIL'}: {desc}{suffix}")
    return ok


def test_criterion_01_random_frame_bounds(capsys):
    start = time.perf_counter()
    rng = np.random.default_rng(MASTER_SEED)
    bad = []
    for k in range(200):
        dim = int(rng.integers(2, 9))
        atoms = int(rng.integers(2, 13))
        fam = instances.random_fusion_family(dim, atoms, int(rng.integers(0, 2**31)))
        bounds = fusion.frame_bounds(fam)

        # independent spectral path through the synthesis matrix
        svals = np.linalg.svd(fusion.synthesis_matrix(fam), compute_uv=False)
        upper_alt = float(svals[0] ** 2)
        lower_alt = float(svals[dim - 1] ** 2) if svals.size >= dim else 0.0
        scale = max(1.0, bounds.upper)
        if abs(bounds.upper - upper_alt) > 1e-8 * scale:
            bad.append((k, "upper paths disagree"))
        if abs(bounds.lower - lower_alt) > 1e-8 * scale:
            bad.append((k, "lower paths disagree"))

        s_mat = fusion.frame_operator(fam)
        probes = rng.standard_normal((dim, 1000))
        probes /= np.linalg.norm(probes, axis=0)
        quotients = np.einsum("ij,ij->j", probes, s_mat @ probes)
        if quotients.min() < bounds.lower - 1e-9:
            bad.append((k, "probe below lower bound"))
        if quotients.max() > bounds.upper + 1e-9:
            bad.append((k, "probe above upper bound"))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed <= 30.0
    assert _line(
        capsys, 1, "bounds enclose 200x1000 Rayleigh quotients, two spectral paths agree",
        ok, f"{elapsed:.2f}s, {len(bad)} violations",
    ), bad[:5]


def test_criterion_02_rotating_line_convergence(capsys):
    start = time.perf_counter()
    limit = math.pi / 2.0
    lows, ups = [], []
    for n in (8, 16, 32, 64):
        bounds = fusion.frame_bounds(instances.rotating_line_family(n))
        lows.append(abs(bounds.lower - limit))
        ups.append(abs(bounds.upper - limit))
    elapsed = time.perf_counter() - start
    floor = 1e-9
    monotone = all(
        b <= max(a, floor) for seq in (lows, ups) for a, b in zip(seq, seq[1:])
    )
    ok = lows[-1] <= 1e-6 and ups[-1] <= 1e-6 and monotone and elapsed <= 1.0
    assert _line(
        capsys, 2, "rotating line converges to pi/2 monotonically",
        ok, f"{elapsed:.2f}s, final errors {lows[-1]:.2e}/{ups[-1]:.2e}",
    )


def test_criterion_03_reconstruction(capsys):
    start = time.perf_counter()
    rng = np.random.default_rng(MASTER_SEED + 3)
    failures = 0
    frames = 0
    draws = 0
    while frames < 50 and draws < 300:
        draws += 1
        dim = int(rng.integers(2, 9))
        fam = instances.random_fusion_family(
            dim, int(rng.integers(2, 13)), int(rng.integers(0, 2**31))
        )
        bounds = fusion.frame_bounds(fam)
        if bounds.lower <= 0 or bounds.upper / bounds.lower > 1e6:
            continue
        frames += 1
        for _ in range(20):
            f = rng.standard_normal(dim)
            if fusion.reconstruct(fam, f).residual > 1e-8:
                failures += 1

    tight = [instances.mercedes_family()]
    tight += [instances.axes_family(d) for d in range(2, 9)]
    tight += [instances.equiangular_family(k) for k in range(3, 11)]
    tight_failures = 0
    for fam in tight:
        for _ in range(20):
            f = rng.standard_normal(fam.ambient_dim)
            if fusion.reconstruct(fam, f).residual > 1e-12:
                tight_failures += 1
    elapsed = time.perf_counter() - start
    ok = frames == 50 and failures == 0 and tight_failures == 0 and elapsed <= 5.0
    assert _line(
        capsys, 3, "20 reconstructions per frame within 1e-8, tight frames within 1e-12",
        ok, f"{elapsed:.2f}s, {failures}+{tight_failures} failures",
    )


def test_criterion_04_induced_fusion_frames(capsys):
    rng = np.random.default_rng(MASTER_SEED + 4)
    failed = []
    for k in range(100):
        dim = int(rng.integers(2, 7))
        atoms = int(rng.integers(2, 9))
        fam = instances.induced_frame_instance(dim, atoms, int(rng.integers(0, 2**31)))
        report, _ = theorems.verify_induced_fusion_frame(fam)
        if not report.passed:
            failed.append((k, report.summary_line()))

    exact_ok = True
    for seed in range(5):
        fam = instances.induced_frame_instance(5, 4, seed, exact=True)
        report, _ = theorems.verify_induced_fusion_frame(fam)
        exact_ok = exact_ok and report.passed
        exact_ok = exact_ok and report.constants["deviation_bound"] <= 1e-12
        exact_ok = exact_ok and abs(
            report.constants["predicted_upper"] - report.constants["gram_upper"]
        ) <= 1e-9
    ok = not failed and exact_ok
    assert _line(
        capsys, 4, "100/100 induced subspace families framed, exact projectors collapse to D",
        ok, f"{len(failed)} failures",
    ), failed[:5]


def test_criterion_05_operator_sandwich(capsys):
    rng = np.random.default_rng(MASTER_SEED + 5)
    failed = []
    flagged = 0
    for k in range(100):
        scaled = k % 7 == 0
        dim = int(rng.integers(2, 7))
        atoms = int(rng.integers(2, 9))
        fam, ops = instances.sandwich_instance(
            dim, atoms, int(rng.integers(0, 2**31)), scaled_orthogonal=scaled
        )
        report = theorems.verify_operator_family_sandwich(fam, ops)
        if not report.passed:
            failed.append((k, report.summary_line()))
        if report.constants["upper_linear_form_holds"] == 0.0:
            flagged += 1
    ok = not failed and flagged >= 1
    assert _line(
        capsys, 5, "100/100 sandwiched between 1/D and D*E^2, linear-form failures flagged",
        ok, f"{flagged} flagged",
    ), failed[:5]


def test_criterion_06_vector_frames_and_support(capsys):
    rng = np.random.default_rng(MASTER_SEED + 6)
    containment_failed = []
    for k in range(50):
        dim = int(rng.integers(2, 7))
        atoms = int(rng.integers(2, 9))
        ops, vectors = instances.vector_frame_instance(
            dim, atoms, int(rng.integers(0, 2**31))
        )
        report = theorems.verify_induced_vector_frame(ops, vectors, tol=1e-8)
        if not report.passed:
            containment_failed.append((k, report.summary_line()))

    support_failed = []
    for k in range(50):
        dim = int(rng.integers(4, 9))
        fam = instances.block_resolution_family(dim, 3, int(rng.integers(0, 2**31)))
        f = np.zeros(dim)
        half = dim - dim // 2
        f[:half] = rng.standard_normal(half)
        outcome = theorems.reconstruct_by_support(fam, f)
        constants = outcome.report.constants
        good = (
            outcome.report.passed
            and constants["support_size"] < fam.natoms
            and constants["residual_inverse_first"] <= 1e-8
            and constants["residual_inverse_last"] <= 1e-8
            and constants["ordering_gap"] <= 1e-9
        )
        if not good:
            support_failed.append((k, outcome.report.summary_line()))
    ok = not containment_failed and not support_failed
    assert _line(
        capsys, 6, "50/50 induced vector frames contained, 50/50 support reconstructions exact",
        ok, f"{len(containment_failed)}+{len(support_failed)} failures",
    ), (containment_failed + support_failed)[:5]


def test_criterion_07_subset_stable_sums(capsys):
    rng = np.random.default_rng(MASTER_SEED + 7)
    kinds = ("columns", "left", "scalar")
    failed = []
    for k in range(100):
        dim = int(rng.integers(2, 9))
        lam = float(rng.uniform(0.2, 0.7))
        base, perturbed, lam = instances.perturbed_sum_instance(
            dim, int(rng.integers(0, 2**31)), kinds[k % 3], lam
        )
        report, _ = perturbation.verify_perturbed_sum(base, perturbed, lam)
        good = (
            report.passed
            and any("exhaustive" in n for n in report.notes)
            and report.constants["deviation_norm"] <= lam + 1e-9
            and report.constants["reconstruction_residual"] <= 1e-9
        )
        if not good:
            failed.append((k, report.summary_line()))
    ok = not failed
    assert _line(
        capsys, 7, "100/100 perturbed sums exhaustively subset-stable with norm inference",
        ok, f"{len(failed)} failures",
    ), failed[:5]


def test_criterion_08_perturbed_resolutions(capsys):
    rng = np.random.default_rng(MASTER_SEED + 8)
    failed = []
    for k in range(100):
        dim = int(rng.integers(2, 6))
        atoms = int(rng.integers(2, 9))
        base, perturbed, params, lam = instances.perturbed_resolution_instance(
            dim, atoms, int(rng.integers(0, 2**31)), "additive"
        )
        report, normalized = perturbation.verify_perturbed_resolution(
            base, perturbed, params, lam
        )
        if not (report.passed and normalized is not None):
            failed.append((k, report.summary_line()))

    degenerate_ok = True
    for seed in range(5):
        base, perturbed, params, lam = instances.perturbed_resolution_instance(
            4, 6, seed, "degenerate"
        )
        report, _ = perturbation.verify_perturbed_resolution(
            base, perturbed, params, lam
        )
        bounds = resolution.resolution_bounds(base)
        degenerate_ok = degenerate_ok and report.passed
        degenerate_ok = degenerate_ok and abs(
            report.constants["predicted_lower"] - bounds.lower
        ) <= 1e-9
        degenerate_ok = degenerate_ok and abs(
            report.constants["predicted_upper"] - bounds.upper
        ) <= 1e-9
    ok = not failed and degenerate_ok
    assert _line(
        capsys, 8, "100/100 perturbed resolutions inside predicted bounds, degenerate case exact",
        ok, f"{len(failed)} failures",
    ), failed[:5]


def test_criterion_09_composite_perturbations(capsys):
    rng = np.random.default_rng(MASTER_SEED + 9)
    failed = []
    for k in range(100):
        dim = int(rng.integers(2, 7))
        atoms = int(rng.integers(2, 9))
        base, comp, params, lam = instances.composite_instance(
            dim, atoms, int(rng.integers(0, 2**31))
        )
        report = perturbation.verify_composite_perturbation(base, comp, params, lam)
        good = (
            report.passed
            and report.constants["probe_lower"] ** 2
            >= report.constants["predicted_lower"] - 1e-9
        )
        if not good:
            failed.append((k, report.summary_line()))
    ok = not failed
    assert _line(
        capsys, 9, "100/100 composite perturbations clear the probe lower bound",
        ok, f"{len(failed)} failures",
    ), failed[:5]


def test_criterion_10_cli_contract(tmp_path, capsys):
    problems = []

    # byte-stable generation
    paths = [tmp_path / f"gen{i}.json" for i in range(2)]
    for p in paths:
        code = cli.main([
            "gen", "--scenario", "random_resolution", "--dim", "4",
            "--atoms", "5", "--seed", "11", "--out", str(p),
        ])
        if code != cli.EXIT_OK:
            problems.append(f"gen exit {code}")
    if paths[0].read_bytes() != paths[1].read_bytes():
        problems.append("gen output not byte-identical")

    # load -> serialize round trip
    text = paths[0].read_text()
    if serialize.dumps_instance(serialize.loads_instance(text)) != text:
        problems.append("round trip not byte-identical")
    fam_text = serialize.dumps_fusion_family(instances.random_fusion_family(4, 6, 1))
    if serialize.dumps_fusion_family(serialize.loads_fusion_family(fam_text)) != fam_text:
        problems.append("fusion round trip not byte-identical")

    # exit code 0: the canonical resolution passes everything
    if cli.main(["verify", "--scenario", "basis_resolution"]) != cli.EXIT_OK:
        problems.append("canonical verify did not exit 0")

    # exit code 1: a failed check
    broken = json.loads(text)
    broken["operators"] = [
        (2.0 * np.asarray(t)).tolist() for t in broken["operators"]
    ]
    bad_path = tmp_path / "broken.json"
    bad_path.write_text(json.dumps(broken))
    if cli.main(["verify", str(bad_path)]) != cli.EXIT_CHECK_FAILED:
        problems.append("failing verify did not exit 1")

    # exit code 2: malformed input
    ugly = tmp_path / "ugly.json"
    ugly.write_text("{")
    if cli.main(["analyze", str(ugly)]) != cli.EXIT_PARSE:
        problems.append("malformed input did not exit 2")

    # exit code 3: families that cannot be compared
    small = instances.random_resolution_family(3, 4, 0)
    big = instances.random_resolution_family(4, 4, 0)
    (tmp_path / "b.json").write_text(serialize.dumps_operator_family(small))
    (tmp_path / "p.json").write_text(serialize.dumps_operator_family(big))
    scen = tmp_path / "scen.json"
    scen.write_text(json.dumps({"base": "b.json", "perturbed": "p.json", "lambda": 0.1}))
    if cli.main(["perturb", str(scen)]) != cli.EXIT_INTERNAL:
        problems.append("mismatched perturb did not exit 3")

    ok = not problems
    assert _line(
        capsys, 10, "determinism, byte round trips and exit codes 0/1/2/3",
        ok, "; ".join(problems) if problems else "",
    ), problems
