import numpy as np
import pytest

from cilab import sharpness
from cilab.exceptions import BelowResolution
from cilab.scalar import isoperimetric_ratio


@pytest.fixture(scope="module")
def coarse():
    return sharpness.default_grid(2, 64)


class TestFamilies:
    def test_unknown_family(self, coarse):
        with pytest.raises(ValueError, match="unknown family"):
            sharpness.probe("nope", g=coarse)

    def test_wrong_bounds_length(self, coarse):
        with pytest.raises(ValueError):
            sharpness.probe("gaussian_profiles", bounds=[(0.1, 0.5), (0.0, 1.0)], g=coarse)

    def test_zero_budget(self, coarse):
        with pytest.raises(ValueError):
            sharpness.probe("gaussian_profiles", budget=0, g=coarse)

    @pytest.mark.parametrize("name", sorted(sharpness.FAMILIES))
    def test_evaluate_positive(self, name, coarse):
        fam = sharpness.family(name)
        ev = sharpness.evaluate(fam, coarse, fam.x0)
        assert ev.ratio > 0 and np.isfinite(ev.ratio)
        assert ev.params == tuple(float(v) for v in fam.x0)


class TestProbe:
    def test_budget_respected(self, coarse):
        res = sharpness.probe("radial_smoothed_indicator", budget=7, g=coarse, restarts=3)
        assert res.evaluations <= 7

    def test_best_not_flagged(self, coarse):
        res = sharpness.probe("radial_smoothed_indicator", budget=20, g=coarse)
        best = [e for e in res.trace if e.params == res.best_params]
        assert any(not e.below_resolution for e in best)
        assert res.best_ratio == max(e.ratio for e in res.trace if not e.below_resolution)

    def test_all_flagged_raises(self, coarse):
        with pytest.raises(BelowResolution):
            sharpness.probe("radial_smoothed_indicator", bounds=[(0.8, 1.0), (0.0, 0.01)], budget=5, g=coarse)

    def test_seeded_reproducible(self, coarse):
        a = sharpness.probe("gaussian_profiles", budget=10, g=coarse, restarts=2, seed=3)
        b = sharpness.probe("gaussian_profiles", budget=10, g=coarse, restarts=2, seed=3)
        assert [e.params for e in a.trace] == [e.params for e in b.trace]

    def test_ball_beats_gaussian(self, coarse):
        rad = sharpness.probe("radial_smoothed_indicator", budget=25, g=coarse)
        gau = sharpness.probe("gaussian_profiles", budget=15, g=coarse)
        assert gau.best_ratio < rad.best_ratio
        assert rad.best_ratio < 1.05 * isoperimetric_ratio(2)


class TestTrace:
    def test_lattice(self):
        pts = sharpness.lattice([1, 2], [3, 4, 5])
        assert len(pts) == 6 and pts[0] == (1.0, 3.0) and pts[-1] == (2.0, 5.0)
        assert sharpness.lattice([], [1]) == []

    def test_surface_and_csv(self, coarse):
        pts = sharpness.lattice([0.8, 1.0], [0.2])
        evs = sharpness.ratio_surface("radial_smoothed_indicator", pts, coarse)
        text = sharpness.trace_csv(evs, ("radius", "width"))
        lines = text.strip().split("\n")
        assert lines[0].startswith("radius,width,lhs")
        assert len(lines) == 3
        assert float(lines[1].split(",")[4]) == evs[0].ratio

    def test_ball_ratio_close(self):
        g = sharpness.default_grid(2, 128)
        assert sharpness.ball_ratio(g) == pytest.approx(isoperimetric_ratio(2), rel=0.06)
