"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` or ``python tests/test_acceptance.py``;
the recorded lines appear in the "acceptance criteria" section of the summary.
"""

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.linalg import expm

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES  # noqa: E402
from oracle_values import ORIGIN_BETA, ORIGIN_BETA3, VERTICAL_PERIOD_ORIGIN  # noqa: E402

from coriolis_orbits.classify import Region, T_periods, crossing_periods, gamma2, gamma3, region, vertical_period
from coriolis_orbits.dynamics import (
    BlowupError,
    HamiltonianSystem,
    NoOrbitFound,
    continue_branch,
    flow,
    linear_mode,
    radial_second_derivative,
    shoot_many,
    shoot_periodic,
)
from coriolis_orbits.linalg import char_poly, de_gua_positive_count, relative_coeff_error
from coriolis_orbits.rt4bp import SQRT3, TOTAL_MASS, MassTriple, analyze, potential
from coriolis_orbits.spectrum import (
    HessianData,
    build_ST,
    morse_ST_planar,
    morse_ST_spatial,
    p2_coeffs,
    quartic_d_coeffs,
    vertical_quadratic,
)

EXPECTED_DEGREES = {"T": -2, "O1": 1, "O2": 1, "O3": 1, "D1": -1, "D2": -1, "D3": -1}


def record(n: int, ok: bool, text: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {text}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def brute_counts(mats) -> np.ndarray:
    ev = np.linalg.eigvalsh(np.asarray(mats))
    return np.sum(ev < 0, axis=-1), np.min(np.abs(ev), axis=-1)


def random_rotation(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


@pytest.fixture(scope="module")
def rng():
    return np.random.default_rng(20261015)


class TestCriterion01MorseTables:
    def test_grid(self):
        t0 = time.perf_counter()
        grid = np.linspace(-8.0, 4.0, 50)
        periods = np.geomspace(0.3, 60.0, 12)
        cells = skipped = mismatches = 0
        for b1 in grid:
            for b2 in grid:
                crossings = crossing_periods(b1, b2)
                keep = [T for T in periods if all(abs(T - c) > 1e-6 * T for c in crossings)]
                skipped += len(periods) - len(keep)
                mats = [build_ST(HessianData.from_betas(b1, b2), T).S for T in keep]
                counts, _ = brute_counts(mats)
                table = np.array([morse_ST_planar(b1, b2, T) for T in keep])
                mismatches += int(np.sum(table != counts))
                cells += len(keep)
        elapsed = time.perf_counter() - t0
        ok = mismatches == 0 and elapsed < 30.0
        record(1, ok, f"Morse tables match brute force on {cells - mismatches}/{cells} cells "
                      f"({skipped} skipped at crossings) in {elapsed:.1f}s")
        assert ok


def admissible_tuple(rng):
    """Random nondegenerate ``(b1, b2, b3)`` and a period, half of them at a crossing."""
    while True:
        b1, b2 = rng.uniform(-8, 4, size=2)
        b3 = rng.uniform(0.05, 10)
        if min(abs(b1), abs(b2)) < 1e-3:
            continue
        cross = crossing_periods(b1, b2, b3)
        if rng.random() < 0.5 and cross:
            T = cross[rng.integers(len(cross))]
        else:
            T = rng.uniform(0.2, 60)
        eps = 1e-4 * T
        # another crossing inside the two-sided window makes the one-sided limits ill-posed
        near = [c for c in cross if abs(c - T) < 2 * eps]
        if T > 1e3 or len(near) > 1 or (len(near) == 1 and abs(near[0] - T) > 1e-12 * T):
            continue
        return b1, b2, b3, T


class TestCriterion02BifurcationNumbers:
    def test_random_tuples(self, rng):
        n, mismatches, at_crossing, nonzero = 10_000, 0, 0, 0
        brute_disagree = 0
        for _ in range(n):
            b1, b2, b3, T = admissible_tuple(rng)
            ib = 1 if b1 * b2 > 0 else -1
            eps = 1e-4 * T
            g2, g3 = gamma2(b1, b2, None, T), gamma3(b1, b2, b3, None, T)
            j2 = morse_ST_planar(b1, b2, T + eps) - morse_ST_planar(b1, b2, T - eps)
            j3 = morse_ST_spatial(b1, b2, b3, T + eps) - morse_ST_spatial(b1, b2, b3, T - eps)
            mismatches += (g2 != ib * j2 // 2) + (g3 != ib * j3 // 2) + (j2 % 2 != 0) + (j3 % 2 != 0)
            if any(abs(c - T) < 1e-12 * T for c in crossing_periods(b1, b2, b3)):
                at_crossing += 1
                h = HessianData.from_betas(b1, b2, b3)
                counts, _ = brute_counts([build_ST(h, T - eps).S, build_ST(h, T + eps).S])
                brute_disagree += int(counts[1] - counts[0] != j3)
            nonzero += g3 != 0
        ok = mismatches == 0 and brute_disagree == 0
        record(2, ok, f"gamma2/gamma3 equal index-times-half-jump on {n} tuples "
                      f"({at_crossing} at crossings, {nonzero} nonzero gamma3, {mismatches} mismatches, "
                      f"{brute_disagree} brute-force disagreements)")
        assert ok


def numeric_p2(vpp):
    """``det(V'' + lambda^2 I - 2 lambda alpha)`` by polynomial arithmetic on the entries."""
    a = np.array([[0.0, -1.0], [1.0, 0.0]])
    entry = [[np.array([1.0 * (i == j), -2.0 * a[i, j], vpp[i, j]]) for j in range(2)] for i in range(2)]
    return np.polysub(np.polymul(entry[0][0], entry[1][1]), np.polymul(entry[0][1], entry[1][0]))


class TestCriterion03CharacteristicPolynomials:
    def test_identities(self, rng):
        worst = [0.0, 0.0, 0.0]
        for _ in range(1000):
            b1, b2 = rng.uniform(-8, 4, size=2)
            b3 = rng.uniform(0.05, 10)
            T = rng.uniform(0.2, 30)
            R = random_rotation(rng, 2)
            vpp = R @ np.diag([b1, b2]) @ R.T
            worst[0] = max(worst[0], relative_coeff_error(p2_coeffs(b1, b2), numeric_p2(vpp)))
            quartic = quartic_d_coeffs(b1, b2, T)
            planar = char_poly(build_ST(HessianData.from_betas(b1, b2), T).S)
            worst[1] = max(worst[1], relative_coeff_error(planar, quartic * quartic))
            spatial = char_poly(build_ST(HessianData.from_betas(b1, b2, b3), T).S)
            factor = quartic * vertical_quadratic(b3, T)
            worst[2] = max(worst[2], relative_coeff_error(spatial, factor * factor))
        ok = max(worst) < 1e-8
        record(3, ok, "polynomial identities on 3x1000 inputs, worst relative coefficient errors "
                      + ", ".join(f"{w:.1e}" for w in worst))
        assert ok


class TestCriterion04DeGua:
    def test_real_rooted(self, rng):
        failures = 0
        for k in range(1000):
            deg = int(rng.integers(1, 13))
            if k % 2:
                # dyadic roots give exactly representable coefficients, with repeats and zeros
                roots = rng.integers(-8, 9, size=deg) / 4.0
            else:
                roots = rng.uniform(-3, 3, size=deg)
                roots[rng.random(deg) < 0.15] = 0.0
                dup = rng.random(deg) < 0.2
                roots[dup] = roots[0]
            coeffs = np.poly(roots) * rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 10)
            failures += de_gua_positive_count(coeffs) != int(np.sum(roots > 0))
        ok = failures == 0
        record(4, ok, f"sign changes equal positive-root multiplicity on {1000 - failures}/1000 polynomials")
        assert ok


class TestCriterion05EqualMasses:
    def test_equal_masses(self):
        t0 = time.perf_counter()
        res = analyze(MassTriple.equal())
        elapsed = time.perf_counter() - t0
        tags = sorted(lp.region_tag for lp in res.points)
        types_ok = (
            tags.count("T") == 4
            and all(tags.count(t) == 1 for t in ("O1", "O2", "O3", "D1", "D2", "D3"))
            and all(lp.brouwer_index == (1 if lp.region_tag.startswith("O") else -1)
                    for lp in res.points if lp.region_tag != "T")
            and sorted(lp.brouwer_index for lp in res.points if lp.region_tag == "T") == [-1, -1, -1, 1]
            and all(abs(lp.betas.beta1 * lp.betas.beta2) > 1e-8 for lp in res.points)
        )
        ok = len(res.points) == 10 and types_ok and res.degrees == EXPECTED_DEGREES and elapsed < 60
        degs = tuple(res.degrees[k] for k in EXPECTED_DEGREES)
        record(5, ok, f"{len(res.points)} nondegenerate critical points, degrees {degs}, {elapsed:.1f}s")
        assert ok


MASS_TRIPLES = [
    (1.0, 1.0, 1.0),
    (1.2, 1.0, 0.8),
    (1.0, 2.0, 3.0),
    (0.2, 1.0, 1.0),
    (2.0, 2.0, 3 * SQRT3 - 4.0),
]


@pytest.fixture(scope="module")
def mass_analyses():
    out = []
    for t in MASS_TRIPLES:
        m = MassTriple.normalized(*t)
        assert abs(m.as_array().sum() - TOTAL_MASS) < 1e-12
        out.append(analyze(m))
    return out


class TestCriterion06MassIndependence:
    def test_degrees(self, mass_analyses):
        distinct = [a.degrees for a in mass_analyses]
        ok = len(distinct) >= 3 and all(d == EXPECTED_DEGREES for d in distinct)
        record(6, ok, f"identical degrees for {sum(d == EXPECTED_DEGREES for d in distinct)}/{len(distinct)} "
                      "mass triples")
        assert ok


class TestCriterion07SevenBranches:
    def test_branches(self, mass_analyses):
        counts = []
        for a in mass_analyses:
            tagged = {lp.region_tag for lp in a.points if lp.vertical_gamma != 0}
            counts.append(len(tagged))
        ok = all(c == 7 for c in counts) and all(a.seven_branches for a in mass_analyses)
        record(7, ok, f"regions with a nonzero vertical gamma3 per triple: {counts}")
        assert ok


class TestCriterion08OriginSpectrum:
    def test_origin(self):
        m = MassTriple.equal()
        h = 1e-4
        fd = np.empty(3)
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            fd[i] = (potential(e, m) - 2 * potential(np.zeros(3), m) + potential(-e, m)) / h**2
        expected = np.array([-1 - 3 * SQRT3 / 2, -1 - 3 * SQRT3 / 2, 3 * SQRT3])
        rel = np.abs(fd - expected) / np.abs(expected)
        origin = [lp for lp in analyze(m).points if np.linalg.norm(lp.position) < 1e-12][0]
        analytic = np.array([origin.betas.beta1, origin.betas.beta2, origin.betas.beta3])
        tv = vertical_period(origin.betas.beta3)
        formula = 2 * math.pi / math.sqrt(3 * SQRT3)
        ok = (
            rel.max() < 1e-6
            and np.allclose(analytic, [ORIGIN_BETA, ORIGIN_BETA, ORIGIN_BETA3], rtol=1e-12)
            and region(origin.betas.beta1, origin.betas.beta2) is Region.R0
            and abs(tv - formula) < 1e-5 * formula
        )
        record(8, ok, f"origin betas match finite differences to {rel.max():.1e}, region R0, "
                      f"vertical period {tv:.10f}")
        assert ok


class TestCriterion09Continuation:
    def test_vertical_family(self):
        m = MassTriple.equal()
        sys3 = HamiltonianSystem.rt4bp(m, 3)
        t0 = time.perf_counter()
        br = continue_branch(sys3, np.zeros(3), VERTICAL_PERIOD_ORIGIN, max_steps=25, gamma=1)
        elapsed = time.perf_counter() - t0
        closure = max(o.closure for o in br.orbits)
        residual = max(o.residual for o in br.orbits)
        extrap = br.extrapolated_period()
        rel = abs(extrap - VERTICAL_PERIOD_ORIGIN) / VERTICAL_PERIOD_ORIGIN
        ok = len(br.orbits) >= 20 and closure < 1e-8 and residual < 1e-8 and rel < 1e-3 and elapsed < 300
        record(9, ok, f"{len(br.orbits)} steps, closure <= {closure:.1e}, extrapolated period "
                      f"{extrap:.9f} (rel. error {rel:.1e}), {elapsed:.1f}s")
        assert ok


class TestCriterion10Pathological:
    def test_no_closed_orbits(self, rng):
        sys2 = HamiltonianSystem.pathological()
        seeds = rng.normal(scale=0.05, size=(100, 4))
        guesses = rng.uniform(1.0, 10.0, size=100)
        results = shoot_many(sys2, seeds, guesses)
        converged = sum(not isinstance(r, NoOrbitFound) for r in results)
        samples, min_val = 0, math.inf
        escaped = 0
        for s, T in zip(seeds, guesses):
            try:
                y = flow(sys2, s, T, n_samples=64).y
            except BlowupError as exc:
                # the trajectory escapes in finite time; sample it up to just before that
                escaped += 1
                y = flow(sys2, s, 0.99 * exc.time, n_samples=64).y
            vals = radial_second_derivative(sys2, y)
            samples += vals.size
            min_val = min(min_val, float(vals.min()))
        ok = converged == 0 and min_val > 0
        record(10, ok, f"{converged}/100 seeds converged; d2/dt2(r^2/2) >= {min_val:.2e} on {samples} samples "
                       f"({escaped} trajectories escape before the guessed period)")
        assert ok


class TestCriterion11LinearOracle:
    def test_quadratic(self, rng):
        period_err = flow_err = 0.0
        n_periods = 0
        for _ in range(8):
            while True:
                b1, b2 = rng.uniform(-8, 4, size=2)
                if region(b1, b2) in (Region.R1, Region.R2, Region.R3, Region.R4):
                    break
            R = random_rotation(rng, 2)
            sys2 = HamiltonianSystem.quadratic(R @ np.diag([b1, b2]) @ R.T)
            J = sys2.jacobian(np.zeros(4))
            ev = np.linalg.eigvals(J)
            imag = ev.imag[(np.abs(ev.real) < 1e-9) & (ev.imag > 1e-9)]
            eigen_periods = sorted(2 * math.pi / imag)
            for T0 in eigen_periods:
                seed = linear_mode(sys2, np.zeros(2), T0, 1e-2)
                orbit = shoot_periodic(sys2, seed + 1e-5, T0 * (1 + 1e-3))
                period_err = max(period_err, abs(orbit.T - T0) / T0)
                n_periods += 1
            u0 = rng.normal(size=4)
            T = rng.uniform(0.5, 10)
            exact = expm(T * J) @ u0
            flow_err = max(flow_err, np.linalg.norm(flow(sys2, u0, T).u_final - exact) / np.linalg.norm(exact))
            assert sorted(t for t in T_periods(b1, b2) if t is not None) == pytest.approx(eigen_periods, rel=1e-8)
        ok = period_err < 1e-8 and flow_err < 1e-8
        record(11, ok, f"shooting recovers {n_periods} eigenperiods to {period_err:.1e}, "
                       f"flow matches the exponential to {flow_err:.1e}")
        assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
