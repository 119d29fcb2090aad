"""
Tests for the sweep runners behind the CLI modes
"""

import math
from itertools import groupby

import pytest
from pydantic import ValidationError

from src.bell_optimizer import EPR_LIMIT_B, chsh_paper_form, optimal_J
from src.models import SweepConfig, SweepMode
from src.sweep import (
    j_grid,
    ordered_map,
    r_grid,
    random_displacement_pairs,
    run_convergence_report,
    run_optimum_curve,
    run_quadruplet_search,
    run_surface,
    run_validate_oracle,
)


def _rows(records):
    return {r: list(group) for r, group in groupby(records, key=lambda record: record.r)}


class TestGrids:
    """Test grid construction"""

    @pytest.mark.unit
    def test_default_grids(self):
        """61 linear r values and 81 log-spaced J values"""
        config = SweepConfig()
        rs, js = r_grid(config), j_grid(config)
        assert len(rs) == 61 and rs[0] == 0.0 and rs[-1] == 3.0
        assert len(js) == 81
        assert js[0] == pytest.approx(1e-5) and js[-1] == pytest.approx(0.5)
        assert js[1] / js[0] == pytest.approx(js[-1] / js[-2])

    @pytest.mark.unit
    def test_linear_j_grid(self):
        """log_j off gives evenly spaced J including zero"""
        config = SweepConfig(j_min=0.0, j_max=0.2, j_steps=5, log_j=False)
        assert j_grid(config) == pytest.approx([0.0, 0.05, 0.1, 0.15, 0.2])

    @pytest.mark.unit
    def test_ordered_map_keeps_order(self):
        """Results come back in input order for any worker count"""
        items = list(range(50))
        assert list(ordered_map(lambda x: x * x, items, 1)) == [x * x for x in items]
        assert list(ordered_map(lambda x: x * x, items, 8)) == [x * x for x in items]


class TestSurface:
    """Test the surface runner"""

    @pytest.mark.unit
    def test_threshold_filters_origin(self):
        """The default threshold drops B = 2 at (0, 0)"""
        config = SweepConfig(r_min=0.0, r_max=0.0, r_steps=1, j_min=0.0, j_max=0.1, j_steps=3, log_j=False)
        assert list(run_surface(config)) == []

    @pytest.mark.unit
    def test_without_threshold(self):
        """With the threshold off every grid point is emitted"""
        config = SweepConfig(r_min=0.0, r_max=0.0, r_steps=1, j_min=0.0, j_max=0.1, j_steps=3, log_j=False, threshold=None)
        records = list(run_surface(config))
        assert len(records) == 3
        assert records[0].r == 0.0 and records[0].J == 0.0
        assert records[0].B == 2.0
        assert records[0].violates is False

    @pytest.mark.unit
    def test_row_major_order_and_values(self):
        """Records run over J fastest and reproduce chsh_paper_form exactly"""
        config = SweepConfig(r_max=1.0, r_steps=5, j_steps=20, threshold=None)
        records = list(run_surface(config))
        assert len(records) == 100
        assert [(rec.r, rec.J) for rec in records] == sorted((rec.r, rec.J) for rec in records)
        for record in records:
            assert record.B == chsh_paper_form(record.r, record.J).B
            assert record.violates == (record.B > 2.0)

    @pytest.mark.unit
    def test_worker_count_does_not_change_output(self):
        """Serial and threaded runs emit identical records"""
        serial = list(run_surface(SweepConfig(r_max=1.0, r_steps=4, j_steps=10, workers=1)))
        threaded = list(run_surface(SweepConfig(r_max=1.0, r_steps=4, j_steps=10, workers=4)))
        assert serial == threaded

    @pytest.mark.slow
    def test_default_surface_shape(self):
        """Violation region of the default grid: empty at r = 0, present for r >= 0.1, bounded by the limit"""
        records = list(run_surface(SweepConfig()))
        rows = _rows(records)
        assert 0.0 not in rows
        for r in r_grid(SweepConfig()):
            if r >= 0.1 - 1e-12:
                assert r in rows
        assert all(record.B <= EPR_LIMIT_B for record in records)

        def row_max(target):
            (key,) = [r for r in rows if math.isclose(r, target, abs_tol=1e-12)]
            return max(record.B for record in rows[key])

        maxima = [row_max(r) for r in (0.1, 0.5, 1.0, 2.0)]
        assert maxima == sorted(maxima)
        assert row_max(3.0) == pytest.approx(EPR_LIMIT_B, abs=2e-3)

        # J* lies inside the violating J range of every row
        for r, row in rows.items():
            j_star, _ = optimal_J(r)
            assert min(record.J for record in row) <= j_star <= max(record.J for record in row)

    @pytest.mark.unit
    def test_surface_near_asymptotic_optimum(self):
        """A grid around r = 5, J = (ln2/3) e^-10 peaks at 2.19"""
        j_center = math.log(2) / 3 * math.exp(-10.0)
        config = SweepConfig(r_min=4.9, r_max=5.1, r_steps=3, j_min=0.5 * j_center, j_max=2.0 * j_center, j_steps=41)
        records = list(run_surface(config))
        assert max(record.B for record in records) == pytest.approx(2.19, abs=1e-3)

    @pytest.mark.unit
    def test_wrong_mode(self):
        """A runner refuses configs built for another mode"""
        with pytest.raises(ValueError):
            list(run_surface(SweepConfig(mode=SweepMode.OPTIMUM_CURVE)))


class TestOptimumCurve:
    """Test the optimum-curve runner"""

    @pytest.mark.unit
    def test_curve(self):
        """J*, B* and the scaled optimum per r"""
        config = SweepConfig(mode=SweepMode.OPTIMUM_CURVE, r_min=0.0, r_max=8.0, r_steps=9)
        records = list(run_optimum_curve(config))
        assert [record.r for record in records] == [float(r) for r in range(9)]

        origin = records[0]
        assert origin.J_star == 0.0 and origin.B_star == 2.0
        assert origin.J_star_times_e2r == 0.0
        assert origin.violates is False

        assert records[1].B_star == pytest.approx(2.183899529976, abs=1e-10)
        assert records[5].J_star_times_e2r == pytest.approx(math.log(2) / 3, abs=1e-4)
        assert records[8].B_star == pytest.approx(2.190551, abs=1e-4)
        for record in records:
            assert record.J == record.J_star
            assert record.B == record.B_star

    @pytest.mark.unit
    def test_threshold_applies(self):
        """An explicit threshold drops the r = 0 row"""
        config = SweepConfig(mode=SweepMode.OPTIMUM_CURVE, r_max=1.0, r_steps=3, threshold=2.0)
        assert [record.r for record in run_optimum_curve(config)] == [0.5, 1.0]


class TestValidateOracle:
    """Test the oracle validation runner"""

    @pytest.mark.unit
    def test_random_pairs_in_disk(self):
        """Sampled displacements are reproducible and stay inside the disk"""
        first = random_displacement_pairs(12345, 0, 10, 1.5)
        assert first == random_displacement_pairs(12345, 0, 10, 1.5)
        assert first != random_displacement_pairs(12345, 1, 10, 1.5)
        assert all(abs(a) <= 1.5 and abs(b) <= 1.5 for a, b in first)

    @pytest.mark.unit
    def test_small_validation(self):
        """Every comparison passes on a small grid"""
        config = SweepConfig(mode=SweepMode.VALIDATE_ORACLE, r_max=1.0, r_steps=2, samples=5, max_displacement=1.0)
        records = list(run_validate_oracle(config))
        assert len(records) == 10
        assert all(record.within_tolerance for record in records)
        assert all(record.error is None for record in records)
        assert all(record.abs_diff < 1e-12 for record in records if record.r == 0.0)

    @pytest.mark.slow
    def test_twenty_pairs_at_r1(self):
        """Default sampling at r = 1 stays within 1e-6"""
        config = SweepConfig(mode=SweepMode.VALIDATE_ORACLE, r_min=1.0, r_max=1.0, r_steps=1, samples=20)
        records = list(run_validate_oracle(config))
        assert len(records) == 20
        assert all(record.abs_diff < 1e-6 for record in records)

    @pytest.mark.unit
    def test_oracle_range_is_limited(self):
        """The oracle mode refuses r_max above 3"""
        with pytest.raises(ValidationError):
            SweepConfig(mode=SweepMode.VALIDATE_ORACLE, r_max=3.5)


class TestQuadrupletSearch:
    """Test the quadruplet-search runner"""

    @pytest.mark.unit
    def test_rows(self):
        """One result per r, never below the one-parameter optimum"""
        config = SweepConfig(mode=SweepMode.QUADRUPLET_SEARCH, r_max=1.0, r_steps=2, restarts=2, workers=1)
        results = list(run_quadruplet_search(config))
        assert [result.r for result in results] == [0.0, 1.0]
        assert results[0].B <= 2.0 + 1e-9
        assert results[1].B >= 2.183899529976 - 1e-9

    @pytest.mark.unit
    def test_deterministic(self):
        """Same config, same output"""
        config = SweepConfig(mode=SweepMode.QUADRUPLET_SEARCH, r_min=0.5, r_max=1.0, r_steps=2, restarts=2)
        assert list(run_quadruplet_search(config)) == list(run_quadruplet_search(config))


class TestConvergenceReportMode:
    """Test the convergence-report runner"""

    @pytest.mark.unit
    def test_uses_configured_point(self):
        """Evaluates at r_min with the configured displacements and cutoffs"""
        config = SweepConfig(
            mode=SweepMode.CONVERGENCE_REPORT,
            r_min=0.5,
            r_max=0.5,
            alpha={"re": 0.2},
            beta={"im": -0.1},
            cutoffs=[10, 20, 40],
        )
        rows = list(run_convergence_report(config))
        assert [row.cutoff for row in rows] == [10, 20, 40]
        assert rows[1].delta > rows[2].delta
