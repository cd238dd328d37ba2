import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entconc.errors import PreconditionError
from entconc.postproc import (
    LP_SUPPORT_MAX,
    TransitionKernel,
    apply_kernel,
    average_improvement_bounds,
    format_kernel,
    generalized_yield,
    identity_kernel,
    kernel_support,
    lagrangian_bound_holds,
    linear_utility,
    lp_distortion_free,
    lp_weighted_sum,
    optimal_under_average_constraint,
    optimal_under_worst_constraint,
    optimize_weighted_sum,
    parse_kernel,
    random_kernel,
    shift_tail_bound_check,
    step_utility,
    validate_utility,
)
from entconc.protocols import failure_probability, total_fidelity
from entconc.schur_measure import yield_distribution

F = Fraction
P34 = [0.75, 0.25]
LINEAR = linear_utility(2)


def _smooth(x):
    return math.sin(math.pi * x / 2)


def test_identity_kernel_changes_nothing():
    dist = yield_distribution(12, P34)
    law, rep = apply_kernel(dist, identity_kernel(dist))
    ref_values, ref_probs = dist.yield_law()
    assert np.allclose(law.values, ref_values) and np.allclose(law.probs, ref_probs)
    assert rep.worst_case == 0 and rep.average == 0


def test_single_shift_example(frozen):
    dist = yield_distribution(3, [F(1, 2), F(1, 2)])
    kernel = identity_kernel(dist)
    rows = kernel.rows.copy()
    rows[0] = 0
    rows[0, 1] = 1
    law, rep = apply_kernel(dist, TransitionKernel(3, 2, kernel.support, rows))
    assert rep.worst_case == pytest.approx(float(F(frozen["shift_example"]["worst"])))
    assert rep.average == pytest.approx(float(F(frozen["shift_example"]["average"])))
    assert list(law.probs) == [1.0]


def test_uplift_average_distortion_bounded_by_mass():
    dist = yield_distribution(30, P34)
    for r in (0.0, 0.05, 0.3):
        kernel, _ = optimal_under_average_constraint(dist, LINEAR, r)
        _, rep = apply_kernel(dist, kernel)
        assert rep.average <= r + 1e-15 and rep.average <= rep.worst_case


def test_generalized_yield_examples():
    dist = yield_distribution(3, [F(1, 2), F(1, 2)])
    assert generalized_yield(dist, step_utility(0.0)) == 1
    assert generalized_yield(dist, LINEAR) == pytest.approx(1 / 6)
    dist = yield_distribution(40, P34)
    for R in (0.3, 0.55, 0.7):
        below = failure_probability(dist, R - 1e-9)
        assert generalized_yield(dist, step_utility(R)) == pytest.approx(1 - below, abs=1e-12)


def test_utility_validation():
    validate_utility(LINEAR, [0.0, 0.5, 1.0], 2)
    with pytest.raises(PreconditionError):
        validate_utility(lambda x: 1 - x, [0.0, 1.0], 2)
    with pytest.raises(PreconditionError):
        validate_utility(lambda x: x / 2, [0.0, 1.0], 2)


def test_weighted_sum_rejects_small_weight():
    with pytest.raises(PreconditionError):
        optimize_weighted_sum(yield_distribution(5, P34), LINEAR, 1.0)


def test_matched_weight_gives_identity_at_every_n():
    for n in range(1, 41):
        kernel, _ = optimize_weighted_sum(yield_distribution(n, P34), LINEAR, 1 / (1 - 2.0 ** -n))
        assert kernel.is_identity, n


def test_threshold_for_weight_just_above_one(frozen):
    threshold = float(frozen["threshold_1.001"])
    assert 9.96 < threshold < 9.97
    for n in range(1, 31):
        kernel, _ = optimize_weighted_sum(yield_distribution(n, P34), LINEAR, 1.001)
        assert kernel.is_identity == (n >= threshold), n


def test_huge_weight_gives_identity():
    for p in (P34, [0.5, 0.3, 0.2]):
        dist = yield_distribution(8, p)
        kernel, _ = optimize_weighted_sum(dist, linear_utility(len(p)), 1e9)
        assert kernel.is_identity


def test_separable_optimum_matches_exact_lp():
    cases = 0
    for p in (P34, [0.6, 0.4], [0.5, 0.3, 0.2]):
        d = len(p)
        for n in range(1, 15):
            dist = yield_distribution(n, p)
            if len(kernel_support(dist)) > LP_SUPPORT_MAX:
                continue
            for f in (linear_utility(d), step_utility(0.5 * math.log2(d)), _smooth if d == 2 else linear_utility(d)):
                for lam in (1.001, 1.3, 3.0):
                    kernel, value = optimize_weighted_sum(dist, f, lam)
                    lp_value, _ = lp_weighted_sum(dist, f, lam)
                    assert value == pytest.approx(float(lp_value), abs=1e-12)
                    cases += 1
    assert cases > 50


def test_distortion_free_optimum_is_identity():
    for n in (3, 6, 9):
        dist = yield_distribution(n, P34)
        for f in (LINEAR, step_utility(0.4), _smooth):
            value, _ = lp_distortion_free(dist, f)
            assert float(value) == pytest.approx(generalized_yield(dist, f), abs=1e-12)


def test_relabelling_leaves_total_fidelity_alone():
    dist = yield_distribution(20, P34)
    before = [total_fidelity(dist, R) for R in (0.2, 0.5, 0.8)]
    apply_kernel(dist, random_kernel(dist, 0.1, np.random.default_rng(3)))
    assert [total_fidelity(dist, R) for R in (0.2, 0.5, 0.8)] == before


def test_upper_triangular_kernels_never_decrease_monotone_utility():
    dist = yield_distribution(15, P34)
    rng = np.random.default_rng(17)
    base = generalized_yield(dist, LINEAR)
    for _ in range(30):
        kernel = random_kernel(dist, 1.0, rng)
        assert kernel.is_upper_triangular
        law, _ = apply_kernel(dist, kernel)
        assert generalized_yield(law, LINEAR) >= base - 1e-12


def test_worst_constraint_examples():
    dist = yield_distribution(100, P34)
    kernel, value = optimal_under_worst_constraint(dist, LINEAR, 0.0)
    assert kernel.is_identity
    kernel, value = optimal_under_worst_constraint(dist, LINEAR, 0.1)
    gain = value - generalized_yield(dist, LINEAR)
    assert 0 < gain <= -math.log2(0.9) / 100 + 1e-12
    _, rep = apply_kernel(dist, kernel)
    assert rep.worst_case <= 0.1 + 1e-12


def test_worst_constraint_keeps_failure_exponent():
    R, r = 0.6, 0.1
    for n in (50, 100, 200):
        dist = yield_distribution(n, P34)
        shift = -math.log2(1 - r) / n
        _, value = optimal_under_worst_constraint(dist, step_utility(R), r)
        # failing after the shift is failing the identity protocol at R - shift
        assert 1 - value == pytest.approx(failure_probability(dist, R - shift - 1e-12), rel=1e-9)


def test_average_constraint_examples():
    dist = yield_distribution(100, P34)
    kernel, value = optimal_under_average_constraint(dist, LINEAR, 0.0)
    assert kernel.is_identity
    base = generalized_yield(dist, LINEAR)
    r = 0.01
    _, value = optimal_under_average_constraint(dist, LINEAR, r)
    bounds = average_improvement_bounds(dist, LINEAR, r, margin=0.05)
    gain = value - base
    assert bounds["exact_tail"] <= gain <= 1.001 * r
    assert bounds["exponential"] <= gain
    assert lagrangian_bound_holds(value, base, 1.001, r)
    ratios = [(optimal_under_average_constraint(dist, LINEAR, r)[1] - base) / r for r in (1e-3, 1e-2, 1e-1)]
    assert max(ratios) - min(ratios) < 1e-9


def test_shift_tail_bound():
    dist = yield_distribution(30, P34)
    holds, prob, bound = shift_tail_bound_check(dist, identity_kernel(dist), 1.0, 0.05)
    assert holds and prob == 0
    r = 0.05
    kernel, _ = optimal_under_average_constraint(dist, LINEAR, r)
    _, rep = apply_kernel(dist, kernel)
    holds, prob, bound = shift_tail_bound_check(dist, kernel, 1.0, rep.average)
    assert holds and prob < bound
    rng = np.random.default_rng(99)
    for _ in range(100):
        kernel = random_kernel(dist, r, rng)
        for c in (0.5, 1.0, 3.0):
            assert shift_tail_bound_check(dist, kernel, c, r)[0]


def test_kernel_text_roundtrip():
    dist = yield_distribution(6, P34)
    kernel, _ = optimize_weighted_sum(dist, LINEAR, 1.001)
    again = parse_kernel(format_kernel(kernel))
    assert again.support == kernel.support and np.array_equal(again.rows, kernel.rows)
    assert (again.n, again.d) == (6, 2)


def test_bad_kernels_rejected():
    with pytest.raises(PreconditionError):
        TransitionKernel(2, 2, (0.0, 1.0), [[0.5, 0.4], [0.0, 1.0]])
    with pytest.raises(PreconditionError):
        parse_kernel("n 2\nsupport 0 1\nrow 1 0\nrow 0 1\n")
    with pytest.raises(PreconditionError):
        apply_kernel(yield_distribution(3, P34), TransitionKernel(3, 2, (0.0, 1.0), np.eye(2)))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([1e-3, 1e-2]), st.integers(10, 60))
def test_lagrangian_bound_for_random_kernels(seed, r, n):
    # valid once the identity is weighted-sum optimal, i.e. from ten copies at weight 1.001
    dist = yield_distribution(n, P34)
    kernel = random_kernel(dist, r, np.random.default_rng(seed))
    law, rep = apply_kernel(dist, kernel)
    assert rep.average <= r + 1e-12
    assert lagrangian_bound_holds(generalized_yield(law, LINEAR), generalized_yield(dist, LINEAR), 1.001, r)


def test_lagrangian_bound_can_fail_below_threshold():
    dist = yield_distribution(5, P34)
    kernel, _ = optimize_weighted_sum(dist, LINEAR, 1.001)
    law, rep = apply_kernel(dist, kernel)
    assert not lagrangian_bound_holds(generalized_yield(law, LINEAR), generalized_yield(dist, LINEAR),
                                      1.001, rep.average)
