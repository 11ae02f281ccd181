"""Acceptance suite: one test per release criterion.

Each test prints a single `[acceptance] ... PASS/FAIL` line to the real
stdout (past pytest's capture) and enforces its runtime budget. The two
statistical criteria (level and power) run the full cloud-to-decision
chain hundreds of times and dominate the suite's runtime.
"""

import math
import time
from contextlib import contextmanager
from itertools import combinations

import numpy as np
import pytest

import oracles
from conftest import random_float_barcode, random_integer_barcode
from tropitest.energy import Sample, energy_statistic, permutation_test
from tropitest.persistence import (
    Bar,
    Barcode,
    bottleneck_bruteforce,
    bottleneck_distance,
    build_rips_filtration,
    compute_barcode,
)
from tropitest.pipeline import pooled_capacity
from tropitest.shapes import (
    PointCloud,
    ShapeSpec,
    pairwise_distances,
    sample_shape,
)
from tropitest.tropical import (
    OrbitIndex,
    canonicalize,
    embedding_dimension,
    gamma_bruteforce,
    gamma_eval,
    orbit_indices,
    regularization_parameter,
    sufficient_statistic,
    tropical_embedding,
)

CIRCLE = ShapeSpec("circle", {"radius": 1.0})
EIGHT = ShapeSpec("figure_eight", {"radius": 0.5})


@contextmanager
def criterion(capfd, cid, name, budget_s, note):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        elapsed = time.perf_counter() - start
        with capfd.disabled():
            print(f"[acceptance] {cid} {name}: FAIL ({elapsed:.1f}s)", flush=True)
        raise
    elapsed = time.perf_counter() - start
    ok = elapsed <= budget_s
    extra = f" {note[0]}" if note else ""
    with capfd.disabled():
        print(
            f"[acceptance] {cid} {name}: {'PASS' if ok else 'FAIL'} "
            f"({elapsed:.1f}s of {budget_s:.0f}s budget){extra}",
            flush=True,
        )
    assert ok, f"{cid} exceeded its runtime budget: {elapsed:.1f}s > {budget_s}s"


def progress(capfd, cid, done, total):
    with capfd.disabled():
        print(f"[acceptance] {cid} progress {done}/{total}", flush=True)


def test_criterion_1_reference_example(capfd):
    note = []
    with criterion(capfd, "C1", "reference-example-regression", 1.0, note):
        first = Barcode((Bar(2, 1), Bar(3, 1)), homology_dim=1)
        second = Barcode((Bar(4, 4),), homology_dim=1)
        assert regularization_parameter([first, second]) == 3
        emb_a = tropical_embedding(first, n=2, m=3)
        emb_b = tropical_embedding(second, n=2, m=3)
        assert emb_a.values == (5, 4, 2, 1, 7)
        assert emb_b.values == (8, 8, 4, 4, 8)
        assert all(type(v) is int for v in emb_a.values + emb_b.values)
        assert sufficient_statistic(first, 2, 3).values == (1, 2, 4, 5, 7)
        assert sufficient_statistic(second, 2, 3).values == (4, 4, 8, 8, 8)
        note.append("embeddings exact in integer arithmetic")


def test_criterion_2_coordinate_system(capfd):
    note = []
    with criterion(capfd, "C2", "coordinate-count-and-order", 1.0, note):
        dims = []
        for n in range(1, 9):
            indices = orbit_indices(n)
            assert len(indices) == n + n * (n + 1) // 2 == embedding_dimension(n)
            assert len(set(indices)) == len(indices)
            assert all(o.k == 0 and 1 <= o.i + o.j <= n for o in indices)
            got = {(o.i, o.j) for o in indices}
            want = {
                (i, j) for i in range(n + 1) for j in range(n + 1) if 0 < i + j <= n
            }
            assert got == want
            dims.append(len(indices))
        assert dims == [2, 5, 9, 14, 20, 27, 35, 44]
        assert [(o.i, o.j) for o in orbit_indices(2)] == [
            (1, 1), (0, 1), (2, 0), (1, 0), (0, 2),
        ]
        note.append(f"dimensions for n=1..8: {dims}")


def test_criterion_3_coordinates_match_bruteforce(capfd):
    note = []
    with criterion(capfd, "C3", "coordinate-vs-bruteforce", 60.0, note):
        rng = np.random.default_rng(303)
        checked = 0
        for trial in range(1000):
            n = int(rng.integers(1, 6))
            m = int(rng.integers(1, 5))
            if trial % 2 == 0:
                barcode = random_integer_barcode(rng, n, m)
                exact = True
            else:
                barcode = random_float_barcode(rng, n, m)
                exact = False
            for i in range(n + 1):
                for j in range(n + 1 - i):
                    for k in range(n + 1 - i - j):
                        if i == j == k == 0:
                            continue
                        idx = OrbitIndex(i=i, j=j, k=k, n=n)
                        fast = gamma_eval(barcode, n, m, idx)
                        slow = gamma_bruteforce(barcode, n, m, idx)
                        if exact:
                            assert fast == slow, (barcode, n, m, idx)
                        else:
                            assert fast == pytest.approx(slow, abs=1e-9)
                        checked += 1
        note.append(f"{checked} coordinate evaluations over 1000 barcodes")


def test_criterion_4_bottleneck_matches_bruteforce(capfd):
    note = []
    with criterion(capfd, "C4", "bottleneck-vs-bruteforce", 60.0, note):
        rng = np.random.default_rng(404)
        for trial in range(500):
            x = random_float_barcode(rng, 4, 4)
            y = random_float_barcode(rng, 4, 4)
            fast = bottleneck_distance(x, y)
            slow = bottleneck_bruteforce(x, y)
            assert fast == pytest.approx(slow, abs=1e-9), (trial, x, y)
        note.append("500 random barcode pairs, tolerance 1e-9")


def test_criterion_5_persistence_correctness(capfd):
    note = []
    with criterion(capfd, "C5", "persistence-correctness", 120.0, note):
        # the square's loop: born with the last side, filled by the diagonals
        square = PointCloud(
            np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        )
        filt = build_rips_filtration(pairwise_distances(square), 2, max_scale=2.0)
        (bar,) = compute_barcode(filt, 1).bars
        assert abs(bar.birth - 1.0) <= 1e-12
        assert abs(bar.death - math.sqrt(2.0)) <= 1e-12

        rng = np.random.default_rng(505)
        for k in (1, 2, 4, 8, 15):
            cloud = PointCloud(rng.standard_normal((k, 2)))
            bars = compute_barcode(
                build_rips_filtration(pairwise_distances(cloud), 1), 0
            ).bars
            assert len(bars) == k
            assert all(b.birth == 0.0 for b in bars)

        # Betti numbers re-derived by independent GF(2) elimination at every
        # critical scale, for 200 random spaces and dimensions 0..2
        for trial in range(200):
            count = int(rng.integers(3, 8))
            pts = rng.standard_normal((count, 3))
            dm = pairwise_distances(PointCloud(pts))
            max_scale = dm.enclosing_radius() * 1.01 + 0.01
            filt = build_rips_filtration(dm, max_dim=3, max_scale=max_scale)
            scales = sorted({s for v, s in filt.simplices})
            for hdim in range(3):
                dropped = compute_barcode(filt, hdim, "drop")
                truncated = compute_barcode(filt, hdim, "truncate")
                finite = [(b.birth, b.death) for b in dropped.bars]
                essential = [
                    b.birth for b in truncated.bars if b.death == filt.max_scale
                ]
                assert len(truncated.bars) == len(finite) + len(essential)
                for eps in scales:
                    want = oracles.betti_at_scale(filt.simplices, hdim, eps)
                    got = oracles.alive_bars(finite, essential, eps)
                    assert got == want, (trial, hdim, eps)
        note.append("200 elimination cross-checks, dims 0-2, every scale")


def test_criterion_6_invariances(capfd):
    note = []
    with criterion(capfd, "C6", "invariance-suite", 120.0, note):
        rng = np.random.default_rng(606)

        # rigid motions preserve the distance matrix
        for _ in range(1000):
            pts = rng.standard_normal((12, 3))
            q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
            moved = pts @ q.T + rng.standard_normal(3)
            d0 = pairwise_distances(PointCloud(pts)).entries
            d1 = pairwise_distances(PointCloud(moved)).entries
            assert np.allclose(d0, d1, rtol=1e-9, atol=1e-12)

        # reordering bars, adding zero-persistence bars, and permuting the
        # coordinate order all leave the sorted statistic unchanged
        for _ in range(1000):
            n = int(rng.integers(1, 6))
            m = int(rng.integers(1, 5))
            barcode = random_integer_barcode(rng, n, m)
            base = sufficient_statistic(barcode, n, m).values
            perm = rng.permutation(len(barcode.bars))
            shuffled = Barcode(
                tuple(barcode.bars[int(p)] for p in perm), barcode.homology_dim
            )
            assert sufficient_statistic(shuffled, n, m).values == base
            padded = Barcode(
                barcode.bars + (Bar(int(rng.integers(0, 9)), 0),),
                barcode.homology_dim,
            )
            assert sufficient_statistic(padded, n, m).values == base
            order = tuple(int(v) for v in rng.permutation(embedding_dimension(n)))
            reordered = tropical_embedding(barcode, n, m, order=order)
            assert tuple(sorted(reordered.values)) == base

        # energy statistic: symmetric, nonnegative, translation invariant
        for _ in range(1000):
            a = Sample(np.sort(rng.standard_normal((4, 3)), axis=1))
            b = Sample(np.sort(rng.standard_normal((5, 3)), axis=1))
            s = energy_statistic(a, b)
            assert s >= 0.0
            assert energy_statistic(b, a) == s
            shift = float(rng.uniform(-2, 2))
            shifted = energy_statistic(
                Sample(a.vectors + shift), Sample(b.vectors + shift)
            )
            assert shifted == pytest.approx(s, rel=1e-9, abs=1e-12)
        note.append("1000 trials per invariance")


def _decide_from_clouds(clouds_a, clouds_b, alpha, perms, seed):
    """The cloud-to-decision chain as the pipeline composes it."""
    barcodes = []
    for cloud in clouds_a + clouds_b:
        filt = build_rips_filtration(pairwise_distances(cloud), 2)
        barcodes.append(compute_barcode(filt, 1))
    n = pooled_capacity(barcodes)
    m = regularization_parameter(barcodes)
    vectors = [
        sufficient_statistic(canonicalize(bc, n), n, m).values for bc in barcodes
    ]
    half = len(clouds_a)
    return permutation_test(
        Sample(np.array(vectors[:half], dtype=float)),
        Sample(np.array(vectors[half:], dtype=float)),
        alpha=alpha,
        num_permutations=perms,
        seed=seed,
    )


def test_criterion_7_level(capfd):
    note = []
    with criterion(capfd, "C7", "test-level-on-null", 1800.0, note):
        runs = 400
        per_side = 20
        rejections = 0
        base = 1_000_000
        for run in range(runs):
            seeds = base + run * 2 * per_side
            clouds_a = [
                sample_shape(CIRCLE, 50, noise_sd=0.05, seed=seeds + c)
                for c in range(per_side)
            ]
            clouds_b = [
                sample_shape(CIRCLE, 50, noise_sd=0.05, seed=seeds + per_side + c)
                for c in range(per_side)
            ]
            result = _decide_from_clouds(clouds_a, clouds_b, 0.05, 499, run)
            rejections += int(result.reject)
            if (run + 1) % 100 == 0:
                progress(capfd, "C7", run + 1, runs)
        rate = rejections / runs
        note.append(f"null rejection rate {rate:.4f} (target [0.02, 0.09])")
        assert 0.02 <= rate <= 0.09, f"null rejection rate {rate}"


def test_criterion_8_power(capfd):
    note = []
    with criterion(capfd, "C8", "test-power-and-trend", 2700.0, note):
        # main claim: circles versus figure-eights at matched scale
        runs = 200
        per_side = 30
        hits = 0
        base = 2_000_000
        for run in range(runs):
            seeds = base + run * 2 * per_side
            clouds_a = [
                sample_shape(CIRCLE, 50, noise_sd=0.05, seed=seeds + c)
                for c in range(per_side)
            ]
            clouds_b = [
                sample_shape(EIGHT, 50, noise_sd=0.05, seed=seeds + per_side + c)
                for c in range(per_side)
            ]
            result = _decide_from_clouds(clouds_a, clouds_b, 0.05, 499, run)
            hits += int(result.reject)
            if (run + 1) % 100 == 0:
                progress(capfd, "C8", run + 1, runs)
        power = hits / runs
        assert power >= 0.9, f"power {power} at {per_side} clouds per side"

        # trend: power does not degrade as collections grow
        powers = []
        for block, per_side in enumerate((10, 20, 40)):
            base = 3_000_000 + block * 1_000_000
            hits = 0
            trend_runs = 100
            for run in range(trend_runs):
                seeds = base + run * 2 * per_side
                clouds_a = [
                    sample_shape(CIRCLE, 50, noise_sd=0.05, seed=seeds + c)
                    for c in range(per_side)
                ]
                clouds_b = [
                    sample_shape(EIGHT, 50, noise_sd=0.05, seed=seeds + per_side + c)
                    for c in range(per_side)
                ]
                result = _decide_from_clouds(clouds_a, clouds_b, 0.05, 499, 700 + run)
                hits += int(result.reject)
            powers.append(hits / trend_runs)
            progress(capfd, "C8-trend", block + 1, 3)
        for small, large in zip(powers, powers[1:]):
            assert large >= small - 0.05, f"power trend broke: {powers}"
        note.append(f"power {power:.3f} at 30/side; trend {powers}")


def test_criterion_9_stability(capfd):
    note = []
    with criterion(capfd, "C9", "coordinate-stability", 60.0, note):
        rng = np.random.default_rng(909)
        worst_margin = math.inf
        for _ in range(1000):
            n = int(rng.integers(1, 5))
            m = int(rng.integers(1, 4))
            # margin from the regularization boundary keeps both the barcode
            # and its perturbation embeddable
            bars = []
            for _ in range(int(rng.integers(0, n + 1))):
                pers = float(rng.uniform(0.5, 3.0))
                birth = float(rng.uniform(0.0, 0.6 * m * pers))
                bars.append(Bar(birth, pers))
            barcode = Barcode(tuple(bars), homology_dim=1)
            eps = float(rng.uniform(0.001, 0.04))
            moved = []
            for bar in barcode.bars:
                db = float(rng.uniform(-eps, eps))
                dd = float(rng.uniform(-eps, eps))
                birth = max(0.0, bar.birth + db)
                death = max(birth, bar.death + dd)
                moved.append(Bar(birth, death - birth))
            other = Barcode(tuple(moved), homology_dim=1)
            for idx in orbit_indices(n):
                a = gamma_eval(barcode, n, m, idx)
                b = gamma_eval(other, n, m, idx)
                bound = (idx.i + idx.j) * (2 * m + 2) * eps
                assert abs(a - b) <= bound + 1e-9, (barcode, other, idx, eps)
                if bound > 0:
                    worst_margin = min(worst_margin, bound - abs(a - b))
            # sorting is 1-Lipschitz in the sup norm, so the statistic obeys
            # the worst single-coordinate bound
            sa = sufficient_statistic(barcode, n, m).values
            sb = sufficient_statistic(other, n, m).values
            cap = n * (2 * m + 2) * eps
            assert max(abs(x - y) for x, y in zip(sa, sb)) <= cap + 1e-9
        note.append("1000 perturbation trials within the Lipschitz bound")
