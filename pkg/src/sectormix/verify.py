"""Self-contained invariant suites behind the `verify` CLI command.

Each suite re-checks its module's core guarantees on fresh random draws and
returns (check name, passed, detail) triples.  These are quick smoke-level
sweeps; the full acceptance run lives in the pytest suite.
"""

import math

import numpy as np

from . import advscm, assignment, clockmix, geometry, objectives, shuffle


def _fraction(mask):
    return float(mask.sum()) / mask.size


def geometry_suite(rng):
    checks = []
    ok = True
    for _ in range(200):
        h, w = int(rng.integers(8, 96)), int(rng.integers(8, 96))
        center = geometry.FaceCenter(float(rng.uniform(0, w - 1)), float(rng.uniform(0, h - 1)))
        rho_base = float(rng.uniform(0, 360))
        rho = float(rng.uniform(1, 359))
        m_base = geometry.rebase_angles(geometry.compute_angle_matrix(h, w, center), rho_base)
        mask = geometry.sector_mask(m_base, rho)
        comp = m_base > rho
        if (mask & comp).any() or not (mask | comp).all():
            ok = False
            break
    checks.append(("partition: mask and complement tile the grid", ok, "200 random fields"))

    m_base = geometry.rebase_angles(
        geometry.compute_angle_matrix(101, 101, geometry.FaceCenter(50, 50)), 0.0
    )
    rhos = np.sort(rng.uniform(1, 359, size=20))
    ok = all(
        not (geometry.sector_mask(m_base, lo) & ~geometry.sector_mask(m_base, hi)).any()
        for lo, hi in zip(rhos, rhos[1:])
    )
    checks.append(("monotonicity: larger sweep contains smaller", ok, "20 nested sweeps"))

    frac = _fraction(geometry.sector_mask(m_base, 90.0))
    checks.append(("area: quadrant sweep selects ~25% of a centered grid",
                   0.24 <= frac <= 0.26, f"fraction={frac:.4f}"))
    return checks


def clockmix_suite(rng):
    checks = []
    ok = True
    for _ in range(40):
        n = int(rng.integers(2, 5))
        cfg_angles = np.sort(rng.uniform(45, 315, size=n - 1))[::-1]
        if np.any(np.diff(cfg_angles[::-1]) < 5):
            continue
        recipe = clockmix.MixRecipe(
            tuple(range(n)),
            tuple(float(a) for a in cfg_angles),
            float(rng.uniform(0, 360)),
            geometry.default_center(64, 64),
        )
        images = [
            clockmix.LabeledImage(np.full((64, 64, 3), 10 * (k + 1), dtype=np.uint8), int(rng.integers(0, 2)))
            for k in range(n)
        ]
        mixed = clockmix.clockmix_n(images, recipe)
        values = np.unique(mixed.pixels)
        if not set(values.tolist()) <= {10 * (k + 1) for k in range(n)}:
            ok = False
            break
        if mixed.label != clockmix.mix_label_hard([im.label for im in images]):
            ok = False
            break
    checks.append(("provenance: every pixel copied from exactly one source", ok, "40 random recipes"))

    ok = all(
        clockmix.mix_label_hard(bits) == int(any(bits))
        for n in range(1, 5)
        for bits in np.ndindex(*([2] * n))
    )
    checks.append(("label algebra equals boolean OR (n <= 4, exhaustive)", ok, "30 combinations"))

    lam = rng.uniform(0, 1, size=50)
    ok = all(abs(clockmix.mix_label_soft(1, 0, l) - l) < 1e-12 for l in lam)
    checks.append(("soft label reproduces linear interpolation", ok, "50 lambdas"))
    return checks


def shuffle_suite(rng):
    checks = []
    ok = True
    for _ in range(60):
        img = rng.integers(0, 256, size=(32, 32, 3), dtype=np.uint8)
        shuffled, perm = shuffle.random_shuffle(rng, img, (2, 4, 8))
        back = shuffle.apply_permutation(shuffled, shuffle.invert(perm))
        if not np.array_equal(back, img):
            ok = False
            break
        if not np.array_equal(
            np.bincount(img.ravel(), minlength=256),
            np.bincount(shuffled.ravel(), minlength=256),
        ):
            ok = False
            break
    checks.append(("round trip: apply then invert restores the image", ok, "60 shuffles"))
    return checks


def assignment_suite(rng):
    checks = []
    ok = True
    for _ in range(60):
        n = int(rng.integers(2, 8))
        m = rng.uniform(0, 1, size=(n, n))
        a = assignment.assignment_score(m, assignment.hungarian_assign(m))
        b = assignment.assignment_score(m, assignment.brute_force_assign(m))
        if abs(a - b) > 1e-9:
            ok = False
            break
    checks.append(("optimality matches the exhaustive oracle", ok, "60 random matrices"))

    trap = np.array([[0.9, 0.8, 0.1], [0.85, 0.1, 0.2], [0.1, 0.7, 0.3]])
    m = trap / trap.sum(axis=1, keepdims=True)
    mapping = assignment.permutation_from_matrix(assignment.hungarian_assign(m)).mapping
    score = assignment.assignment_score(trap, assignment.hungarian_assign(m))
    ok = list(mapping) == [1, 0, 2] and abs(score - 1.95) < 1e-9
    checks.append(("greedy trap resolves to the global optimum", ok, f"score={score:.4f}"))

    uniform = np.full((4, 4), 0.25)
    mapping = [int(c) for c in
               assignment.permutation_from_matrix(assignment.hungarian_assign(uniform)).mapping]
    checks.append(("uniform scores tie-break lexicographically", mapping == [0, 1, 2, 3], str(mapping)))
    return checks


def advscm_suite(rng):
    checks = []
    size, g = 32, 4
    scorer = advscm.ReferenceScorer((g,), seed=int(rng.integers(2**31)))
    imgs = advscm.make_toy_images(rng, 2, size)
    m = scorer.score(imgs[0], imgs[1], g)
    m_hat = assignment.hungarian_assign(assignment.as_score_matrix(m))
    grad = scorer.grad_log_p(imgs[0], imgs[1], m_hat, g)

    theta = scorer.theta.copy()
    h = 1e-5
    idx = np.flatnonzero(np.abs(grad) > 1e-9)[:24]
    ok = True
    worst = 0.0
    for i in idx:
        t_hi = theta.copy(); t_hi[i] += h
        t_lo = theta.copy(); t_lo[i] -= h
        scorer.theta = t_hi
        p_hi = advscm.selection_probability(scorer.score(imgs[0], imgs[1], g), m_hat)
        scorer.theta = t_lo
        p_lo = advscm.selection_probability(scorer.score(imgs[0], imgs[1], g), m_hat)
        scorer.theta = theta
        fd = (math.log(p_hi) - math.log(p_lo)) / (2 * h)
        rel = abs(fd - grad[i]) / max(abs(fd), abs(grad[i]), 1e-8)
        worst = max(worst, rel)
        if rel >= 1e-4:
            ok = False
    checks.append(("analytic grad log p matches finite differences", ok, f"max rel err={worst:.2e}"))

    d = 0.5
    theta2 = advscm.reinforce_update(theta, [(d, grad)], 1e-3)
    scorer.theta = theta2
    p_after = advscm.selection_probability(scorer.score(imgs[0], imgs[1], g), m_hat)
    scorer.theta = theta
    p_before = advscm.selection_probability(scorer.score(imgs[0], imgs[1], g), m_hat)
    checks.append(("single ascent step increases log p", p_after > p_before,
                   f"{math.log(p_before):.6f} -> {math.log(p_after):.6f}"))
    return checks


def objectives_suite(rng):
    checks = []
    v = objectives.bce_loss(objectives.Prediction(0.5, 1.0))
    checks.append(("loss at y'=0.5 equals ln 2", abs(v - math.log(2)) < 1e-9, f"{v:.6f}"))
    v = objectives.bce_loss(objectives.Prediction(1.0, 1.0))
    checks.append(("saturated correct prediction costs ~0", v <= 1e-6, f"{v:.2e}"))
    grid = np.linspace(0.01, 0.99, 99)
    losses = [objectives.bce_loss(objectives.Prediction(float(yp), 1.0)) for yp in grid]
    ok = all(a > b for a, b in zip(losses, losses[1:]))
    checks.append(("loss strictly decreases toward the true label", ok, "99-point grid"))
    return checks


SUITES = {
    "geometry": geometry_suite,
    "clockmix": clockmix_suite,
    "shuffle": shuffle_suite,
    "assignment": assignment_suite,
    "advscm": advscm_suite,
    "objectives": objectives_suite,
}


def run_suites(names=None, seed=0):
    """Run the selected suites; returns (rows, all_passed)."""
    rows = []
    all_ok = True
    for name, suite in SUITES.items():
        if names and name not in names:
            continue
        rng = np.random.default_rng(seed)
        for check, ok, detail in suite(rng):
            rows.append((name, check, ok, detail))
            all_ok = all_ok and ok
    return rows, all_ok
