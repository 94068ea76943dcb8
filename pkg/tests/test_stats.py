import numpy as np
import pytest

from sparcs.stats import DegenerateGroups, kruskal_wallis


def test_identical_groups_h_zero():
    h, p = kruskal_wallis([[1, 2, 3], [1, 2, 3]])
    assert h == pytest.approx(0.0, abs=1e-12)
    assert p == pytest.approx(1.0, abs=1e-9)


def test_hand_computed_two_group_value():
    # ranks 1..10, R1=15, R2=40 -> H = 12/110 * (45 + 320) - 33 = 6.8181...
    h, p = kruskal_wallis([[1, 2, 3, 4, 5], [6, 7, 8, 9, 10]])
    assert h == pytest.approx(6.818, abs=1e-3)
    assert 0 < p < 0.01


def test_all_identical_values_degenerate():
    h, p = kruskal_wallis([[2, 2], [2, 2, 2]])
    assert (h, p) == (0.0, 1.0)


def test_structure_errors():
    with pytest.raises(DegenerateGroups):
        kruskal_wallis([[1, 2, 3]])
    with pytest.raises(DegenerateGroups):
        kruskal_wallis([[1, 2], []])


def test_matches_scipy_with_ties():
    from scipy.stats import kruskal

    rng = np.random.default_rng(0)
    for _ in range(25):
        groups = [list(rng.integers(0, 6, int(rng.integers(3, 12)))) for _ in range(3)]
        if len({v for g in groups for v in g}) == 1:
            continue
        h, p = kruskal_wallis(groups)
        ref = kruskal(*groups)
        assert h == pytest.approx(ref.statistic, rel=1e-10)
        assert p == pytest.approx(ref.pvalue, rel=1e-8)


def test_null_calibration_rejection_rate():
    # three groups from one distribution: p < 0.05 in about 5% of runs
    rng = np.random.default_rng(123)
    rejections = 0
    runs = 1000
    for _ in range(runs):
        groups = [rng.uniform(0, 1, 10) for _ in range(3)]
        _, p = kruskal_wallis(groups)
        rejections += p < 0.05
    assert abs(rejections / runs - 0.05) <= 0.02
