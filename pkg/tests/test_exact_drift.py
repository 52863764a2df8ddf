import itertools
import math

import numpy as np
import pytest

from twolin import (
    Params,
    State,
    brute_force_drift,
    check_domination,
    conditional_drift,
    conformance_report,
    drift_table,
    exact_drift,
    mc_drift,
    multiflip_contribution,
    multiflip_flip_bound,
)
from twolin.exact_drift import binom_pmf, single_flip_ratio_bound


class TestBinomPmf:
    def test_small_exact(self):
        pmf, tail = binom_pmf(4, 0.25)
        expected = [0.75 ** 4, 4 * 0.25 * 0.75 ** 3, 6 * 0.25 ** 2 * 0.75 ** 2,
                    4 * 0.25 ** 3 * 0.75, 0.25 ** 4]
        assert pmf == pytest.approx(expected, abs=1e-15)
        assert tail == pytest.approx(0.0, abs=1e-12)

    def test_truncation_reported(self):
        pmf, tail = binom_pmf(10 ** 5, 2e-5, tail_tol=1e-15)
        assert len(pmf) < 40
        assert 0 <= tail < 1e-15
        assert pmf.sum() == pytest.approx(1.0, abs=1e-14)

    def test_m_zero(self):
        pmf, tail = binom_pmf(0, 0.3, min_len=4)
        assert pmf.tolist() == [1.0, 0.0, 0.0, 0.0]


class TestExactDrift:
    def test_optimum_has_zero_drift(self):
        for p in (Params(1.0, 0.5, 0.5, 10), Params(3.0, 0.2, 0.7, 1000)):
            dv = exact_drift(State(0, 0), p)
            assert dv.d_l == 0.0 and dv.d_r == 0.0

    def test_hand_fixture_n4(self):
        # 16 masks by hand: rho=1, ell=0.5, chi=1, state (1,0)
        dv = exact_drift(State(1, 0), Params(1.0, 1.0, 0.5, 4))
        assert dv.d_l == pytest.approx(3 / 16, abs=1e-14)
        assert dv.d_r == pytest.approx(-3 / 32, abs=1e-14)

    def test_oracle_agreement_random_cases(self):
        rng = np.random.default_rng(0)
        for _ in range(40):
            n = int(rng.integers(4, 13))
            chi = float(rng.choice([0.5, 1.0, 2.0, 3.0]))
            rho = float(rng.choice([0.0, 0.3, 0.5, 0.7, 1.0]))
            ell = float(rng.choice([0.25, 0.5, 0.75]))
            p = Params(chi, rho, ell, n)
            s = State(int(rng.integers(0, p.left_len + 1)),
                      int(rng.integers(0, p.right_len + 1)))
            ex, bf = exact_drift(s, p), brute_force_drift(s, p)
            assert ex.d_l == pytest.approx(bf.d_l, abs=1e-12)
            assert ex.d_r == pytest.approx(bf.d_r, abs=1e-12)

    def test_all_states_n10(self):
        p = Params(2.0, 0.3, 0.5, 10)
        for xl in range(p.left_len + 1):
            for xr in range(p.right_len + 1):
                s = State(xl, xr)
                ex, bf = exact_drift(s, p), brute_force_drift(s, p)
                assert ex.d_l == pytest.approx(bf.d_l, abs=1e-12)
                assert ex.d_r == pytest.approx(bf.d_r, abs=1e-12)

    def test_symmetry_swap(self):
        p = Params(2.0, 0.5, 0.5, 1000)
        for s in (State(5, 5), State(20, 3), State(0, 12)):
            a = exact_drift(s, p)
            b = exact_drift(State(s.x_r, s.x_l), p)
            assert a.d_l == pytest.approx(b.d_r, abs=1e-15)
            assert a.d_r == pytest.approx(b.d_l, abs=1e-15)

    def test_mirror_params_swap(self):
        # exchanging (rho, ell) -> (1-rho, 1-ell) mirrors the parts exactly
        p = Params(1.5, 0.3, 0.7, 400)
        q = Params(1.5, 0.7, 0.3, 400)
        for s in (State(10, 4), State(0, 7), State(25, 25)):
            a = exact_drift(s, p)
            b = exact_drift(State(s.x_r, s.x_l), q)
            assert a.d_l == pytest.approx(b.d_r, abs=1e-15)
            assert a.d_r == pytest.approx(b.d_l, abs=1e-15)

    def test_out_of_bounds(self):
        with pytest.raises(ValueError):
            exact_drift(State(6, 0), Params(1.0, 0.5, 0.5, 10))


class TestBruteForce:
    def test_rejects_large_n(self):
        with pytest.raises(ValueError):
            brute_force_drift(State(1, 1), Params(1.0, 0.5, 0.5, 16))

    def test_zero_state(self):
        dv = brute_force_drift(State(0, 0), Params(1.0, 0.5, 0.5, 8))
        assert dv.d_l == 0.0 and dv.d_r == 0.0

    def test_matches_literal_environment_evaluation(self):
        """Spot-check the vectorized enumeration against per-mask evaluation
        through the environment module, mask by mask."""
        from twolin.environment import BitString, Env, compare

        p = Params(1.0, 0.6, 0.5, 6)
        s = State(2, 1)
        parent = BitString.with_state(s.x_l, s.x_r, p)
        fp = p.flip_prob
        d_l = d_r = 0.0
        for mask in range(2 ** p.n):
            flips = np.array([i for i in range(p.n) if (mask >> i) & 1],
                             dtype=np.int64)
            y = parent.apply_flips(flips)
            w = fp ** len(flips) * (1 - fp) ** (p.n - len(flips))
            for env, prob in ((Env.F1, p.rho), (Env.F2, 1 - p.rho)):
                if compare(parent, y, env, p):
                    d_l += prob * w * (s.x_l - y.zeros_left)
                    d_r += prob * w * (s.x_r - y.zeros_right)
        bf = brute_force_drift(s, p)
        assert bf.d_l == pytest.approx(d_l, abs=1e-14)
        assert bf.d_r == pytest.approx(d_r, abs=1e-14)


class TestConditionalDrift:
    def test_delta_00_is_zero(self):
        for p, s in ((Params(1.0, 0.5, 0.5, 12), State(3, 2)),
                     (Params(2.0, 0.3, 0.25, 40), State(5, 11))):
            assert conditional_drift(0, 0, s, p) == pytest.approx(0.0, abs=1e-14)
            tab = drift_table(s, p)
            assert tab.delta[0, 0] == pytest.approx(0.0, abs=1e-14)

    def test_index_out_of_range(self):
        p = Params(1.0, 0.5, 0.5, 12)
        with pytest.raises(ValueError):
            conditional_drift(4, 0, State(3, 2), p)

    def test_table_matches_literal(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            n = int(rng.integers(6, 40))
            p = Params(float(rng.choice([0.5, 1.5, 3.0])),
                       float(rng.choice([0.2, 0.5, 0.8])),
                       float(rng.choice([0.25, 0.5, 0.7])), n)
            s = State(int(rng.integers(0, p.left_len + 1)),
                      int(rng.integers(0, p.right_len + 1)))
            tab = drift_table(s, p)
            i = int(rng.integers(0, s.x_l + 1))
            j = int(rng.integers(0, s.x_r + 1))
            assert tab.delta[i, j] == pytest.approx(
                conditional_drift(i, j, s, p), abs=1e-12)

    def test_law_of_total_probability(self):
        for chi, rho, ell in itertools.product((0.5, 2.0), (0.3, 0.5), (0.25, 0.5)):
            p = Params(chi, rho, ell, 12)
            for xl in range(p.left_len + 1):
                for xr in range(p.right_len + 1):
                    s = State(xl, xr)
                    tab = drift_table(s, p)
                    scalar = float(np.sum(tab.event_probs() * tab.delta))
                    assert scalar == pytest.approx(exact_drift(s, p).total,
                                                   abs=1e-10)

    def test_single_flip_lower_bound_subcritical(self):
        """At rho=ell=1/2 and chi below the threshold, the drift conditional
        on one left zero-flip is at least (e^-chi/4)(2 - chi + 2 e^-chi/2)."""
        p = Params(2.0, 0.5, 0.5, 10 ** 4)
        s = State(50, 50)
        d10 = conditional_drift(1, 0, s, p)
        bound = math.exp(-2.0) / 4 * (2 - 2.0 + 2 * math.exp(-1.0))
        assert d10 >= bound
        d01 = conditional_drift(0, 1, s, p)
        assert d01 >= bound
        assert d10 == pytest.approx(d01, abs=1e-15)


class TestMonteCarlo:
    def test_zero_state_zero_variance(self):
        p = Params(1.0, 0.5, 0.5, 100)
        mc = mc_drift(State(0, 0), p, 1000, np.random.default_rng(0))
        assert mc.d_l == 0.0 and mc.d_r == 0.0
        assert mc.ci_halfwidth == (0.0, 0.0)

    def test_sample_floor(self):
        p = Params(1.0, 0.5, 0.5, 100)
        with pytest.raises(ValueError):
            mc_drift(State(1, 1), p, 50, np.random.default_rng(0))

    def test_ci_coverage_meta(self):
        """99% CIs contain the exact value in >= 99% of 200 seeded repeats,
        per component."""
        p = Params(2.0, 0.5, 0.5, 100)
        s = State(10, 5)
        ex = exact_drift(s, p)
        rng = np.random.default_rng(2024)
        cover_l = cover_r = 0
        for _ in range(200):
            mc = mc_drift(s, p, 40_000, rng)
            cover_l += abs(mc.d_l - ex.d_l) <= mc.ci_halfwidth[0]
            cover_r += abs(mc.d_r - ex.d_r) <= mc.ci_halfwidth[1]
        assert cover_l >= 198
        assert cover_r >= 198

    def test_ci_clt_scaling(self):
        p = Params(2.0, 0.5, 0.5, 100)
        s = State(10, 5)
        rng = np.random.default_rng(5)
        m1 = mc_drift(s, p, 50_000, rng)
        m2 = mc_drift(s, p, 200_000, rng)
        for k in (0, 1):
            ratio = m1.ci_halfwidth[k] / m2.ci_halfwidth[k]
            assert abs(ratio - 2.0) < 0.4  # within 20% of the CLT factor


class TestDomination:
    def test_symmetric_chi2_no_violations(self):
        rep = check_domination(Params(2.0, 0.5, 0.5, 20))
        assert rep.ok
        assert rep.states_checked == 11 * 11

    def test_asymmetric_no_violations(self):
        rep = check_domination(Params(1.5, 0.3, 0.7, 20))
        assert rep.ok
        assert rep.hypothesis_states > 0

    def test_claim2_ratio_bound(self):
        p = Params(2.0, 0.5, 0.5, 20)
        s = State(6, 4)
        tab = drift_table(s, p)
        for i in range(1, s.x_l + 1):
            c = single_flip_ratio_bound(i, s, p)
            assert c >= 1.0
            assert tab.delta[i, 0] >= c * tab.delta[1, 0] - 1e-12


class TestMultiflip:
    def test_zero_at_optimum(self):
        assert multiflip_contribution(State(0, 0), Params(2.0, 0.5, 0.5, 100)) == 0.0

    def test_quadratic_scaling(self):
        p = Params(2.0, 0.5, 0.5, 10 ** 4)
        c1 = multiflip_contribution(State(50, 50), p)
        c2 = multiflip_contribution(State(100, 100), p)
        ratio = c2 / c1
        assert 4 / 1.5 <= ratio <= 4 * 1.5

    def test_bounded_by_flip_count(self):
        for s in (State(50, 50), State(10, 90), State(3, 3)):
            p = Params(2.0, 0.5, 0.5, 10 ** 4)
            assert multiflip_contribution(s, p) <= multiflip_flip_bound(s, p)


class TestConformance:
    def test_monotone_non_increasing_instance(self):
        """At (chi=2, rho=0.5, ell=0.25), beta=1% in the gamma0:1 ratio, the
        componentwise deviation from A x/n shrinks across n = 1e3, 1e4, 1e5."""
        rows = conformance_report(2.0, 0.5, 0.25)
        rl = [r.rel_dev[0] for r in rows]
        rr = [r.rel_dev[1] for r in rows]
        assert rl[0] >= rl[1] >= rl[2]
        assert rr[0] >= rr[1] >= rr[2]

    def test_deviation_shrinks_with_beta(self):
        """The actual (1 +- o(1)) contract: at fixed n the deviation goes to
        zero as the zero-bit density does."""
        devs = []
        for beta in (0.04, 0.02, 0.01, 0.005):
            rows = conformance_report(2.0, 0.5, 0.5, n_list=(10 ** 4,), beta=beta)
            devs.append(max(rows[0].rel_dev))
        assert devs == sorted(devs, reverse=True)
        assert devs[-1] < 0.05

    def test_symmetric_chi2_measured_values(self):
        """Documented behavior: at fixed beta the deviation converges to a
        nonzero beta-limit from below, so it mildly increases with n here."""
        rows = conformance_report(2.0, 0.5, 0.5)
        rel = [r.rel_dev[0] for r in rows]
        assert rel[0] == pytest.approx(0.08794, abs=2e-4)
        assert rel[2] == pytest.approx(0.09369, abs=2e-4)


def test_truncation_mass_reported():
    dv = exact_drift(State(50, 50), Params(2.0, 0.5, 0.5, 10 ** 4))
    assert 0 <= dv.truncation_mass < 1e-13
