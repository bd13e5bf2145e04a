import logging
import math

import numpy as np
import pytest

from pointwave.config import MOLLER_SCHEDULE, OUTPUT_FORMATS
from pointwave.errors import ConfigError
from pointwave.radial import RadialGrid, make_coupling
from pointwave.settings import (
    bump_reach,
    initial_state,
    light_cone_violation,
    load_config,
    parse_config,
    random_states,
    thread_count,
)
from pointwave.spectral import transform_state


def minimal(**extra):
    cfg = {'alpha': 0.1, 'grid': {'r_max': 40.0, 'n_r': 400}}
    cfg.update(extra)
    return cfg


class TestParseConfig:

    def test_defaults(self):
        run = parse_config(minimal())
        assert run.alpha == 0.1
        assert run.grid.h == pytest.approx(0.1)
        assert run.t_max == 1.0
        assert run.n_samples == 11
        assert run.formats == OUTPUT_FORMATS
        assert run.times == MOLLER_SCHEDULE
        assert run.direction == 'plus'
        assert run.checks == []
        assert run.initial == []

    def test_sections_are_read(self):
        run = parse_config(minimal(
            horizon={'t_max': 2.5, 'n_samples': 6},
            checks=['group_law', 'krein_rank'],
            output={'directory': 'somewhere', 'formats': ['json']},
            scatter={'direction': 'minus', 'times': [1, 2, 4]},
            seed=7,
        ))
        assert run.t_max == 2.5
        assert list(run.sample_times) == pytest.approx([0.0, 0.5, 1.0, 1.5, 2.0, 2.5])
        assert run.checks == ['group_law', 'krein_rank']
        assert run.output_directory == 'somewhere'
        assert run.formats == ('json',)
        assert run.direction == 'minus'
        assert run.times == (1.0, 2.0, 4.0)
        assert run.seed == 7

    def test_missing_grid_field_names_its_path(self):
        cfg = minimal()
        del cfg['grid']['n_r']
        with pytest.raises(ConfigError) as info:
            parse_config(cfg)
        assert info.value.field == 'grid.n_r'
        assert 'grid.n_r' in str(info.value)

    @pytest.mark.parametrize("cfg, path", [
        ({'grid': {'r_max': 40.0, 'n_r': 400}}, 'alpha'),
        ({'alpha': 0.1}, 'grid'),
        ({'alpha': 'strong', 'grid': {'r_max': 40.0, 'n_r': 400}}, 'alpha'),
        ({'alpha': 0.1, 'grid': {'r_max': 40.0, 'n_r': 'many'}}, 'grid.n_r'),
        ({'alpha': 0.1, 'grid': {'r_max': -1.0, 'n_r': 400}}, 'grid'),
        ({'alpha': float('nan'), 'grid': {'r_max': 40.0, 'n_r': 400}}, 'alpha'),
    ])
    def test_invalid_top_level(self, cfg, path):
        with pytest.raises(ConfigError) as info:
            parse_config(cfg)
        assert info.value.field == path

    @pytest.mark.parametrize("extra, path", [
        ({'checks': ['group_law', 'telepathy']}, 'checks'),
        ({'output': {'formats': ['xml']}}, 'output.formats'),
        ({'scatter': {'direction': 'up'}}, 'scatter.direction'),
        ({'horizon': {'n_samples': 1}}, 'horizon.n_samples'),
        ({'horizon': {'t_max': -1.0}}, 'horizon.t_max'),
        ({'horizon': [1, 2]}, 'horizon'),
    ])
    def test_invalid_sections(self, extra, path):
        with pytest.raises(ConfigError) as info:
            parse_config(minimal(**extra))
        assert info.value.field == path

    @pytest.mark.parametrize("initial, path", [
        ([{'sphere': {}}], 'initial[0]'),
        ([{'gaussian_bump': {'center': 5.0}}], 'initial[0].gaussian_bump.width'),
        ([{'gaussian_bump': {'center': 5.0, 'width': 0.0}}], 'initial[0].gaussian_bump.width'),
        ([{'charge': {'Q': 1.0, 'component': 'momentum'}}], 'initial[0].charge.component'),
        ([{'g_lambda': {'lambda': -1.0}}], 'initial[0].g_lambda.lambda'),
        ([{'charge': {}}], 'initial[0].charge.Q'),
        ([{'charge': {'Q': 1.0}, 'gaussian_bump': {'center': 1, 'width': 1}}], 'initial[0]'),
    ])
    def test_invalid_initial(self, initial, path):
        with pytest.raises(ConfigError) as info:
            parse_config(minimal(initial=initial))
        assert info.value.field == path

    def test_single_initial_mapping_is_accepted(self):
        run = parse_config(minimal(initial={'charge': {'Q': 2.0}}))
        assert run.initial == [{'kind': 'charge', 'Q': 2.0, 'component': 'position'}]

    def test_spectral_section_only_warns(self, caplog):
        with caplog.at_level(logging.WARNING, logger='pointwave.settings'):
            run = parse_config(minimal(spectral={'n_k': 64, 'k_max': 1000.0}))
        assert run.n_k == 64
        assert 'n_k' in caplog.text
        assert 'k_max' in caplog.text


class TestLoadConfig:

    def test_reads_yaml(self, tmp_path):
        path = tmp_path / 'run.yaml'
        path.write_text("alpha: -0.5\ngrid:\n  r_max: 20.0\n  n_r: 200\n", encoding='utf-8')
        run = load_config(str(path))
        assert run.alpha == -0.5
        assert run.n_r == 200

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match='not found'):
            load_config(str(tmp_path / 'absent.yaml'))

    def test_malformed_yaml_reports_the_line(self, tmp_path):
        path = tmp_path / 'broken.yaml'
        path.write_text("alpha: 0.1\ngrid: [r_max: 20\n", encoding='utf-8')
        with pytest.raises(ConfigError, match='line'):
            load_config(str(path))

    def test_empty_file(self, tmp_path):
        path = tmp_path / 'empty.yaml'
        path.write_text("", encoding='utf-8')
        with pytest.raises(ConfigError) as info:
            load_config(str(path))
        assert info.value.field == 'alpha'


class TestThreads:

    def test_default(self, monkeypatch):
        monkeypatch.delenv('POINTWAVE_THREADS', raising=False)
        assert thread_count() == 1

    def test_from_environment(self, monkeypatch):
        monkeypatch.setenv('POINTWAVE_THREADS', '4')
        assert thread_count() == 4
        monkeypatch.setenv('POINTWAVE_THREADS', '0')
        assert thread_count() == 1

    def test_garbage_falls_back(self, monkeypatch, caplog):
        monkeypatch.setenv('POINTWAVE_THREADS', 'lots')
        with caplog.at_level(logging.WARNING, logger='pointwave.settings'):
            assert thread_count() == 1
        assert 'POINTWAVE_THREADS' in caplog.text


class TestLightCone:

    def test_bump_reach(self):
        run = parse_config(minimal(initial=[
            {'gaussian_bump': {'center': 5.0, 'width': 1.0}},
            {'gaussian_bump': {'center': 12.0, 'width': 2.0, 'component': 'velocity'}},
            {'charge': {'Q': 1.0}},
        ]))
        assert bump_reach(run) == pytest.approx(24.0)

    def test_violation_reports_required_radius(self):
        run = parse_config(minimal(initial=[{'gaussian_bump': {'center': 12.0, 'width': 2.0}}],
                                   horizon={'t_max': 10.0}))
        assert light_cone_violation(run) == pytest.approx(44.0)
        assert light_cone_violation(run, t_max=5.0) is None


class TestInitialState:

    def test_components_add_up(self):
        run = parse_config(minimal(initial=[
            {'charge': {'Q': 1.0}},
            {'g_lambda': {'lambda': 1.0, 'coefficient': 2.0}},
            {'gaussian_bump': {'center': 10.0, 'width': 1.0, 'component': 'velocity'}},
        ]))
        s = initial_state(run)
        assert s.position.charge == pytest.approx(3.0)
        assert s.velocity.charge == 0.0
        assert s.velocity.full().u.max() == pytest.approx(1.0, abs=1e-3)

    def test_charge_profile_is_flat(self):
        s = initial_state(parse_config(minimal(alpha=0.0, initial=[{'charge': {'Q': 1.0}}])))
        assert s.position.full().u == pytest.approx(1.0 / math.sqrt(4.0 * math.pi))

    def test_eigenvector(self):
        run = parse_config(minimal(alpha=-1.0 / (4.0 * math.pi), initial=[{'eigenvector': {}}]))
        s = initial_state(run)
        assert s.position.full().u[0] == pytest.approx(math.sqrt(2.0))
        assert s.position.full().u[10] == pytest.approx(math.sqrt(2.0) * math.exp(-1.0))

    def test_eigenvector_needs_negative_alpha(self):
        run = parse_config(minimal(initial=[{'eigenvector': {}}]))
        with pytest.raises(ConfigError):
            initial_state(run)


class TestRandomStates:

    def test_count_and_grid(self, rng):
        grid = RadialGrid(40.0, 400)
        states = random_states(make_coupling(0.1), grid, rng, 20)
        assert len(states) == 20
        assert all(s.grid == grid for s in states)

    def test_states_carry_a_charge(self, rng):
        grid = RadialGrid(40.0, 400)
        states = random_states(make_coupling(0.0), grid, rng, 5)
        assert all(s.position.charge != 0.0 for s in states)
        assert len({round(s.position.charge, 12) for s in states}) == 5

    def test_negative_coupling_adds_the_eigenvector(self, rng):
        c = make_coupling(-1.0 / (4.0 * math.pi))
        grid = RadialGrid(40.0, 400)
        for s in random_states(c, grid, rng, 3):
            assert abs(transform_state(c, s).x) > 1e-6

    def test_same_seed_same_states(self):
        grid = RadialGrid(40.0, 400)
        c = make_coupling(0.1)
        a = random_states(c, grid, np.random.default_rng(7), 2)
        b = random_states(c, grid, np.random.default_rng(7), 2)
        for s, t in zip(a, b):
            np.testing.assert_array_equal(s.position.full().u, t.position.full().u)
            np.testing.assert_array_equal(s.velocity.full().u, t.velocity.full().u)
