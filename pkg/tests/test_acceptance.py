"""The twelve acceptance criteria, one test each.

Every test records a PASS/FAIL line that pytest prints in an
"acceptance criteria" section at the end of the run.
"""
import math
import time

import numpy as np

from conftest import record_criterion
from entconc.oracle import verify_extracted_entanglement, verify_outcome_law
from entconc.partitions import (
    dim_u,
    dim_v,
    dim_v_determinant,
    dim_v_product,
    enumerate_young_indices,
)
from entconc.postproc import (
    apply_kernel,
    generalized_yield,
    linear_utility,
    optimize_weighted_sum,
    random_kernel,
)
from entconc.protocols import (
    average_yield,
    bbps_average_yield_exact,
    exponent,
    gap_constant,
    hardy_average_yield,
    hardy_qubit_expansion,
    hardy_qubit_yield,
    log2_failure_probability,
    log2_infidelity,
    log2_strong_converse_probability,
)
from entconc.estimation import estimator_error_exponent, estimator_mse
from entconc.rates import (
    dimension_entropy_bound_check,
    expansion_coefficients_bbps,
    kl_divergence,
    rate_function,
    shannon_entropy,
)
from entconc.schur_measure import pairwise_divergence, yield_distribution

P34 = [0.75, 0.25]
GRID = [(s, n) for s in ("1/2,1/2", "3/4,1/4", "1,0", "0.6,0.4", "9/10,1/10") for n in (2, 3, 4, 5)]
GRID += [(s, n) for s in ("1/2,1/3,1/6", "1/3,1/3,1/3", "0.5,0.3,0.2") for n in (2, 3)]


def _approaches(values, target):
    """Distances to ``target`` never grow; infinite entries (empty tails) count as farthest."""
    gaps = [abs(v - target) if math.isfinite(v) else math.inf for v in values]
    return all(b <= a for a, b in zip(gaps, gaps[1:])), gaps[-1]


def test_criterion_01_dimension_identities():
    start = time.perf_counter()
    sums_ok = all(sum(dim_u(lam) * dim_v(lam) for lam in enumerate_young_indices(n, d)) == d ** n
                  for d in range(1, 5) for n in range(13))
    formulas_ok = all(dim_v_determinant(lam) == dim_v_product(lam)
                      for n in range(1, 21) for d in range(1, 6) for lam in enumerate_young_indices(n, d))
    elapsed = time.perf_counter() - start
    ok = sums_ok and formulas_ok and elapsed < 10
    record_criterion(1, ok, f"dimension sums={sums_ok} formulas agree={formulas_ok} time={elapsed:.1f}s")
    assert ok


def test_criterion_02_oracle_equivalence():
    start = time.perf_counter()
    worst = max(verify_outcome_law(spec, n) for spec, n in GRID)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 120
    record_criterion(2, ok, f"max |formula - dense trace| = {worst:.2e} over {len(GRID)} cases, time={elapsed:.1f}s")
    assert ok


def test_criterion_03_extracted_state_structure():
    worst_group = worst_entropy = 0.0
    ranks_ok = True
    checked = 0
    for spec, n in GRID:
        dist = yield_distribution(n, spec, exact=False)
        for lam, pr in zip(dist.indices, dist.prob_array()):
            if pr <= 1e-6:
                continue
            chk = verify_extracted_entanglement(spec, n, lam)
            checked += 1
            ranks_ok &= chk.rank_ok and chk.extracted_bits == math.log2(dim_v(lam))
            worst_group = max(worst_group, chk.group_residual)
            worst_entropy = max(worst_entropy, chk.entropy_residual)
    ok = ranks_ok and worst_group <= 1e-8 and worst_entropy <= 1e-8
    record_criterion(3, ok, f"{checked} outcomes, block residual={worst_group:.1e}, "
                            f"entropy residual={worst_entropy:.1e}, ranks ok={ranks_ok}")
    assert ok


def test_criterion_04_dimension_entropy_bound():
    start = time.perf_counter()
    margins = [dimension_entropy_bound_check(lam)[1]
               for d, top in ((2, 200), (3, 60)) for n in range(1, top + 1)
               for lam in enumerate_young_indices(n, d)]
    elapsed = time.perf_counter() - start
    ok = min(margins) >= 0 and elapsed < 30
    record_criterion(4, ok, f"{len(margins)} indices, smallest margin={min(margins):.3e}, time={elapsed:.1f}s")
    assert ok


def test_criterion_05_exponent_convergence():
    start = time.perf_counter()
    ns = (50, 100, 200, 400)
    dists = {n: yield_distribution(n, P34) for n in ns}
    low, high = 0.6, 0.95
    low_target, high_target = rate_function(P34, low), rate_function(P34, high)
    sequences = {
        "failure@0.6": ([exponent(log2_failure_probability(dists[n], low), n) for n in ns], low_target),
        "1-F@0.6": ([exponent(log2_infidelity(dists[n], low), n) for n in ns], low_target),
        "strong-converse@0.95": ([exponent(log2_strong_converse_probability(dists[n], high), n) for n in ns],
                                 high_target),
    }
    elapsed = time.perf_counter() - start
    parts, ok = [], elapsed < 60
    for name, (values, target) in sequences.items():
        monotone, final_gap = _approaches(values, target)
        ok &= monotone and final_gap < 0.08
        shown = ",".join(f"{v:.4f}" for v in values)
        parts.append(f"{name} [{shown}] -> {target:.4f} monotone={monotone} gap={final_gap:.3f}")
    record_criterion(5, ok, "; ".join(parts))
    assert ok


def test_criterion_06_known_state_expansion():
    h = shannon_entropy(P34)
    a, b = expansion_coefficients_bbps(P34)
    ns = (200, 500, 1000, 2000)
    residuals = [n * abs(bbps_average_yield_exact(n, P34) - (h + a * math.log2(n) / n + b / n)) for n in ns]
    ok = all(y < x for x, y in zip(residuals, residuals[1:])) and residuals[-1] < 0.05
    record_criterion(6, ok, "n*residual " + ", ".join(f"{r:.2e}" for r in residuals))
    assert ok


def test_criterion_07_universal_gap():
    ns = (500, 1000, 2000)
    scaled = [n * (bbps_average_yield_exact(n, P34) - average_yield(yield_distribution(n, P34))) for n in ns]
    constant = gap_constant(P34)
    spread = (max(scaled) - min(scaled)) / np.mean(scaled)
    match = abs(scaled[-1] / constant - 1)
    ok = min(scaled) > 0 and spread < 0.10 and match < 0.05
    record_criterion(7, ok, "n*gap " + ", ".join(f"{g:.4f}" for g in scaled)
                     + f"; spread={spread:.3%}; constant={constant:.4f} (off by {match:.2%})")
    assert ok


def test_criterion_08_optimal_known_state_yield():
    single = hardy_average_yield([0.75, 0.25])
    ns = (100, 300, 1000)
    residuals = [n * abs(hardy_qubit_yield(n, P34) - hardy_qubit_expansion(n, P34)) for n in ns]
    ok = single == 0.5 and all(y < x for x, y in zip(residuals, residuals[1:]))
    record_criterion(8, ok, f"single copy={single}; n*residual " + ", ".join(f"{r:.4f}" for r in residuals))
    assert ok


def test_criterion_09_weighted_sum_threshold():
    f = linear_utility(2)
    identity_at = {n: optimize_weighted_sum(yield_distribution(n, P34), f, 1.001)[0].is_identity
                   for n in range(1, 41)}
    large_ok = all(identity_at[n] for n in range(10, 41))
    small_moves = any(not identity_at[n] for n in range(1, 10))
    matched_ok = all(optimize_weighted_sum(yield_distribution(n, P34), f, 1 / (1 - 2.0 ** -n))[0].is_identity
                     for n in range(1, 41))
    threshold = -math.log2(1 - 1 / 1.001)
    ok = large_ok and small_moves and matched_ok
    record_criterion(9, ok, f"threshold={threshold:.3f}; identity for n>=10: {large_ok}; "
                            f"moves for some n<10: {small_moves}; matched weight identity n=1..40: {matched_ok}")
    assert ok


def test_criterion_10_lagrangian_bound():
    f = linear_utility(2)
    lam = 1.001
    dist = yield_distribution(100, P34)
    base = generalized_yield(dist, f)
    rng = np.random.default_rng(20241017)
    worst_slack = math.inf
    count = 0
    for r in (1e-3, 1e-2):
        for _ in range(50):
            kernel = random_kernel(dist, r, rng)
            law, rep = apply_kernel(dist, kernel)
            assert rep.average <= r + 1e-12
            worst_slack = min(worst_slack, base + lam * r - generalized_yield(law, f))
            count += 1
    ok = worst_slack >= -1e-12
    record_criterion(10, ok, f"{count} kernels at n=100, smallest slack={worst_slack:.3e}")
    assert ok


def test_criterion_11_estimation():
    primary, typed, bound = estimator_mse(P34, 300)
    type_ok = abs(typed / bound - 1) < 0.10
    primary_ok = abs(primary / bound - 1) < 0.15
    tail = estimator_error_exponent(P34, 0.2, [200])[0]

    def close(value, target):
        if math.isinf(target) or math.isinf(value):
            return value == target
        return abs(value - target) <= 0.08

    tails_ok = close(tail.lower, tail.lower_target) and close(tail.upper, tail.upper_target)
    ok = type_ok and primary_ok and tails_ok
    record_criterion(11, ok, f"bound={bound:.4f}; type n*MSE={typed:.4f} ({typed / bound - 1:+.1%}, ok={type_ok}); "
                             f"primary n*MSE={primary:.4f} ({primary / bound - 1:+.1%}, ok={primary_ok}); "
                             f"lower tail {tail.lower:.4f} vs {tail.lower_target:.4f}, "
                             f"upper tail {tail.upper} vs {tail.upper_target} (ok={tails_ok})")
    assert ok


def test_criterion_12_divergence_slope():
    p, q = P34, [0.6, 0.4]
    target = kl_divergence(q, p)
    ns = (20, 40, 80)
    residuals = [abs(pairwise_divergence(n, p, q) / n - target) for n in ns]
    ok = all(r <= 5 / n for r, n in zip(residuals, ns))
    record_criterion(12, ok, "n*residual " + ", ".join(f"{r * n:.3f}" for r, n in zip(residuals, ns)) + " (limit 5)")
    assert ok


if __name__ == "__main__":
    import sys

    import pytest

    sys.exit(pytest.main([__file__, "-q"]))
