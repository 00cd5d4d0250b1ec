import numpy as np
import pytest

from bkm.cases import builtin, case_names, run_case

ALL_NAMES = ("helmholtz", "laplace", "convdiff_x", "convdiff_xy",
             "nonlinear_poisson", "burger")


class TestCatalog:
    def test_names(self):
        assert set(case_names()) == set(ALL_NAMES)

    def test_unknown_name_lists_valid(self):
        with pytest.raises(ValueError) as err:
            builtin("poisson")
        for name in ALL_NAMES:
            assert name in str(err.value)

    def test_exact_spot_values(self):
        assert builtin("helmholtz").exact(1.5, 0.0) == pytest.approx(0.997, abs=5e-4)
        assert builtin("convdiff_xy").exact(-1.5, 0.0) == pytest.approx(5.482, abs=5e-4)
        assert builtin("burger").exact(3.0, -0.45) == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_domains(self):
        assert builtin("laplace").problem.domain.center == (0.0, 0.0)
        assert builtin("nonlinear_poisson").problem.domain.center == (3.0, 0.0)
        assert builtin("burger").problem.domain.center == (3.0, 0.0)

    def test_default_shapes(self):
        expected = {"laplace": 25.0, "convdiff_x": 4.0, "convdiff_xy": 5.5,
                    "nonlinear_poisson": 2.0, "burger": 1.0}
        for name, c in expected.items():
            assert builtin(name).default_shape == c

    @pytest.mark.parametrize("name", ALL_NAMES)
    def test_exact_satisfies_original_equation(self, name):
        # the boundary data doubles as the solution by construction
        case = builtin(name)
        rng = np.random.default_rng(59)
        cx = case.problem.domain.center[0]
        checked = 0
        while checked < 20:
            p = rng.uniform(-1.2, 1.2, size=2) * np.array([1.0, 0.6])
            p[0] += cx
            if case.problem.domain.implicit(p[None])[0] > -0.2:
                continue
            assert abs(case.original_residual(p[0], p[1])) <= 1e-5
            checked += 1

    @pytest.mark.parametrize("name", ALL_NAMES)
    def test_eval_points_inside_or_on_domain(self, name):
        case = builtin(name)
        assert np.all(case.problem.domain.implicit(case.eval_points) <= 1e-12)


class TestRunCase:
    def test_laplace_three_knots_matches_exact_to_print_precision(self):
        report = run_case(builtin("laplace"), boundary_n=3)
        for row in report.rows:
            assert abs(row["computed"] - row["exact"]) <= 5e-4

    def test_helmholtz_eleven_knots_published_row(self):
        report = run_case(builtin("helmholtz"), boundary_n=11)
        row = next(r for r in report.rows if r["x"] == 0.6 and r["y"] == -0.45)
        assert row["computed"] == pytest.approx(0.565, abs=5e-3)

    def test_nonlinear_average(self):
        report = run_case(builtin("nonlinear_poisson"))
        assert report.average_abs_rel_err() <= 2.0

    def test_rows_ordered_and_rel_err_convention(self):
        report = run_case(builtin("nonlinear_poisson"))
        case = builtin("nonlinear_poisson")
        assert [(r["x"], r["y"]) for r in report.rows] == [
            (float(p[0]), float(p[1])) for p in case.eval_points]
        for row in report.rows:
            want = 100.0 * (row["exact"] - row["computed"]) / row["exact"]
            assert row["rel_err_pct"] == pytest.approx(want)

    def test_zero_exact_entries_have_null_rel_err(self):
        report = run_case(builtin("helmholtz"))
        zero_rows = [r for r in report.rows if r["exact"] == 0.0]
        assert zero_rows and all(r["rel_err_pct"] is None for r in zero_rows)

    def test_interior_on_nonlinear_rejected(self):
        with pytest.raises(ValueError):
            run_case(builtin("burger"), interior_l=3)

    def test_deterministic_reports(self):
        a = run_case(builtin("convdiff_x"))
        b = run_case(builtin("convdiff_x"))
        assert a.rows == b.rows
        assert a.summary == b.summary

    def test_custom_eval_points(self):
        pts = np.array([[0.25, 0.1], [0.5, -0.2]])
        report = run_case(builtin("laplace"), eval_points=pts)
        assert len(report.rows) == 2
        assert report.rows[0]["exact"] == pytest.approx(0.35)

    def test_shape_override(self):
        default = run_case(builtin("convdiff_x"))
        loose = run_case(builtin("convdiff_x"), shape=0.5)
        assert default.average_abs_rel_err() < loose.average_abs_rel_err()

    def test_summary_fields(self):
        report = run_case(builtin("laplace"))
        s = report.summary
        assert s["n_boundary"] == 5 and s["n_interior"] == 0
        assert s["condition_estimate_drm"] is not None
        assert s["condition_estimate_bkm"] is not None

    def test_paper_columns_shape(self):
        for name in ALL_NAMES:
            case = builtin(name)
            for column in case.paper_columns.values():
                assert len(column) == len(case.eval_points)
