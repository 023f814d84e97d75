# -*- coding: utf-8 -*-

import math

import pytest
import numpy as np

from sierpinski.geometry import Point2
from sierpinski.flow import (
    BlowUpError, VanDerPol, Duffing, ExprSystem, BackwardSystem, IntegratorConfig,
    SectionRequest, TrajectorySample, build_system, duffing_energy, vector_field,
    rk4_step, flow_to, evolve_points, sample_times, trajectory_samples,
)
from sierpinski.tests import assert_point_close, circle_points


def oscillator():
    return ExprSystem.parse("y", "-x")


class TestSystems(object):
    def test_van_der_pol(self):
        assert_point_close(vector_field(VanDerPol(0.5), 0.0, Point2(0, 1)), (1.0, 0.5))
        assert VanDerPol(0.5).autonomous

    def test_duffing(self):
        system = build_system("duffing")
        assert_point_close(vector_field(system, 0.0, Point2(1, 0)), (0.0, -0.8))
        assert not system.autonomous
        assert Duffing(0.1, 1, 1, 0, 1).autonomous

    def test_expr(self):
        system = ExprSystem.parse("y + t", "-x")
        assert_point_close(vector_field(system, 2.0, Point2(1, 3)), (5.0, -1.0))
        assert not system.autonomous
        assert oscillator().autonomous
        array_x, array_y = system.field(2.0, np.array([1.0, 0.0]), np.array([3.0, 0.0]))
        assert array_x.tolist() == [5.0, 2.0]
        assert array_y.tolist() == [-1.0, -0.0]

    def test_backward(self):
        system = BackwardSystem(build_system("duffing"))
        assert system.name == "backward-duffing"
        v = vector_field(system, 0.0, Point2(1, 0))
        assert_point_close(v, (0.0, 0.8))

    def test_build_system(self):
        assert build_system("vdp", mu=1.3) == VanDerPol(1.3)
        assert build_system("vdp") == VanDerPol(0.5)
        assert build_system("duffing", gamma=0) == Duffing(0.08, 0, 1, 0, 1)
        with pytest.raises(ValueError):
            build_system("expr", dx="y")
        with pytest.raises(ValueError) as e:
            build_system("vdpp")
        assert "did you mean 'vdp'" in str(e.value)
        with pytest.raises(ValueError):
            VanDerPol(float("inf"))


class TestConfig(object):
    def test_integrator_config(self):
        assert IntegratorConfig().h == 1e-3
        for h in (0, -1, float("nan")):
            with pytest.raises(ValueError):
                IntegratorConfig(h=h)

    def test_section_request(self):
        sections = SectionRequest.parse("1, 3,5 ,7")
        assert sections.times == (1.0, 3.0, 5.0, 7.0)
        assert sections.smallest_gap == 2.0
        assert SectionRequest([2]).smallest_gap is None
        for text in ("3,1", "1,1", "-1,2", "a,b"):
            with pytest.raises(ValueError):
                SectionRequest.parse(text)


class TestRk4(object):
    def test_one_step(self):
        p = rk4_step(oscillator(), 0.0, Point2(1, 0), 0.1)
        assert_point_close(p, (math.cos(0.1), -math.sin(0.1)), tol=1e-6)
        with pytest.raises(ValueError):
            rk4_step(oscillator(), 0.0, Point2(1, 0), 0.0)

    def test_blow_up_step(self):
        with pytest.raises(BlowUpError) as e:
            rk4_step(ExprSystem.parse("1/(x-1)", "0"), 0.0, Point2(1, 0), 0.1)
        assert e.value.time == pytest.approx(0.1)

    def test_flow_to(self):
        cfg = IntegratorConfig(h=1e-3)
        assert_point_close(flow_to(oscillator(), Point2(1, 0), 2 * math.pi, cfg), (1, 0), tol=1e-8)
        assert_point_close(flow_to(oscillator(), Point2(1, 0), math.pi / 2, cfg), (0, -1), tol=1e-9)
        assert flow_to(oscillator(), Point2(0.3, 0.4), 0.0, cfg) == Point2(0.3, 0.4)
        with pytest.raises(ValueError):
            flow_to(oscillator(), Point2(1, 0), -1.0, cfg)

    def test_fourth_order(self):
        exact = (math.cos(1.0), -math.sin(1.0))

        def error(h):
            p = flow_to(oscillator(), Point2(1, 0), 1.0, IntegratorConfig(h=h))
            return math.hypot(p.x - exact[0], p.y - exact[1])

        ratio = error(0.1) / error(0.05)
        assert 12 <= ratio <= 20

    def test_composition(self):
        system = build_system("vdp")
        cfg = IntegratorConfig(h=1e-3)
        p0 = Point2(0.3, -0.2)
        direct = flow_to(system, p0, 2.0, cfg)
        sections = evolve_points(system, [p0], SectionRequest([1.0, 2.0]), cfg)
        assert_point_close(sections.sections[1][0], direct, tol=1e-8)

    def test_duffing_energy(self):
        system = Duffing(0, 1, 1, 0, 1)
        p0 = Point2(1, 0)
        p = flow_to(system, p0, 10.0, IntegratorConfig(h=1e-3))
        assert abs(duffing_energy(system, p) - duffing_energy(system, p0)) < 1e-7

    def test_backward_undoes_forward(self):
        system = build_system("vdp", mu=1.3)
        cfg = IntegratorConfig(h=1e-3)
        p0 = Point2(0.5, 0.5)
        p1 = flow_to(system, p0, 1.5, cfg)
        assert_point_close(flow_to(BackwardSystem(system), p1, 1.5, cfg), p0, tol=1e-8)

    def test_blow_up(self):
        # x' = x^2 from x = 1 blows up at t = 1
        system = ExprSystem.parse("x^2", "0")
        with pytest.raises(BlowUpError) as e:
            flow_to(system, Point2(1, 0), 2.0, IntegratorConfig(h=1e-3))
        assert 0.9 < e.value.time <= 1.1


class TestEvolve(object):
    def test_sections(self):
        points = circle_points(12, 0.5)
        cfg = IntegratorConfig(h=1e-3)
        result = evolve_points(oscillator(), points, SectionRequest([0, 1, 3]), cfg)
        assert result.times == (0.0, 1.0, 3.0)
        assert result.sections[0] == points
        assert result.failures == []
        for p0, p in zip(points, result.sections[2]):
            assert_point_close(p, flow_to(oscillator(), p0, 3.0, cfg), tol=1e-12)
        assert result.summary_lines()[-1] == "failures: 0"

    def test_workers(self):
        points = circle_points(50, 0.8)
        cfg = IntegratorConfig(h=1e-2)
        system = build_system("vdp")
        one = evolve_points(system, points, SectionRequest([0.5, 1.0]), cfg, workers=1)
        four = evolve_points(system, points, SectionRequest([0.5, 1.0]), cfg, workers=4)
        assert one.sections == four.sections

    def test_failures_are_dropped(self):
        system = ExprSystem.parse("x^2", "0")
        points = [Point2(2, 0), Point2(-1, 0), Point2(0.2, 0)]
        result = evolve_points(system, points, SectionRequest([0.1, 1.0]), IntegratorConfig(h=1e-3))
        assert result.indices[0] == [0, 1, 2]
        assert result.indices[1] == [1, 2]
        assert len(result.failures) == 1
        failure = result.failures[0]
        assert failure.index == 0
        assert failure.start == Point2(2, 0)
        assert 0.1 < failure.time <= 0.6
        assert "blew up" in failure.message

    def test_step_larger_than_gap(self):
        with pytest.raises(ValueError):
            evolve_points(
                oscillator(), [Point2(1, 0)], SectionRequest([1.0, 1.05]), IntegratorConfig(h=0.1))

    def test_empty(self):
        result = evolve_points(oscillator(), [], SectionRequest([1.0]), IntegratorConfig())
        assert result.sections == [[]]


class TestTrajectory(object):
    def test_sample_times(self):
        assert sample_times(1.0, 0.25) == [0.0, 0.25, 0.5, 0.75, 1.0]
        times = sample_times(1.0, 0.3)
        assert times[-1] == 1.0
        assert len(times) == 5
        times = sample_times(8.0, 0.1)
        assert len(times) == 81
        assert times[-1] == 8.0
        with pytest.raises(ValueError):
            sample_times(1.0, 2.0)
        with pytest.raises(ValueError):
            sample_times(1.0, 0.0)

    def test_samples(self):
        points = [Point2(1, 0), Point2(0, 0.5)]
        result = trajectory_samples(oscillator(), points, 1.0, 0.25, IntegratorConfig(h=1e-3))
        assert len(result.trajectories) == 2
        first = result.trajectories[0]
        assert [s.t for s in first] == [0.0, 0.25, 0.5, 0.75, 1.0]
        assert first[0] == TrajectorySample(t=0.0, p=Point2(1, 0))
        assert_point_close(first[-1].p, (math.cos(1.0), -math.sin(1.0)), tol=1e-9)

    def test_blown_up_points_are_dropped(self):
        system = ExprSystem.parse("x^2", "0")
        points = [Point2(2, 0), Point2(0.1, 0)]
        result = trajectory_samples(system, points, 1.0, 0.5, IntegratorConfig(h=1e-3))
        assert len(result.trajectories) == 1
        assert result.trajectories[0][0].p == Point2(0.1, 0)
        assert [f.index for f in result.failures] == [0]


if __name__ == "__main__":
    import os

    basename = os.path.basename(__file__)
    pytest.main([basename, "-s", "--tb=native"])
