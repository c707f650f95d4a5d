import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alignlab import environment as env
from alignlab.environment import (
    DOWN, HARVEST, LEFT, N_ACTIONS, OBS_DIM, RIGHT, STAY, UP,
    EnvConfig, GridWorld, WorldState, harm_from_transition, observe, reset, step,
)
from alignlab.errors import ConfigError, DomainError, StateError


def make_world(positions, stock=None, hazards=(), **cfg):
    config = EnvConfig(**{"n_resources": 0, "n_hazards": 0, "n_agents": len(positions), **cfg})
    state = WorldState(list(positions), dict(stock or {}), frozenset(hazards))
    return GridWorld(config, state, 0, np.zeros(len(positions)))


def test_reset_deterministic_single_agent():
    cfg = EnvConfig(width=3, height=3, n_agents=1, n_resources=1, n_hazards=1)
    w1, _ = reset(cfg, 0)
    w2, _ = reset(cfg, 0)
    assert w1.agent_positions == w2.agent_positions
    assert w1.episode_step == 0


def test_reset_shapes():
    world, obs = reset(EnvConfig(n_agents=5), 3)
    assert obs.shape == (5, OBS_DIM)
    assert len(world.agent_positions) == 5


def test_seeds_give_distinct_layouts():
    cfg = EnvConfig()
    same = sum(reset(cfg, s)[0].state == reset(cfg, s + 1000)[0].state for s in range(100))
    assert same == 0


def test_overfull_grid_rejected():
    with pytest.raises(ConfigError):
        reset(EnvConfig(width=2, height=2, n_agents=3, n_resources=1, n_hazards=1), 0)


def test_all_stay_on_empty_cells():
    world = make_world([(0, 0), (4, 4)])
    _, r, h, _ = step(world, [STAY, STAY])
    assert not np.any(r) and not np.any(h)


def test_harvest_abundant_no_neighbor():
    world = make_world([(2, 2), (6, 6)], stock={(2, 2): 3})
    _, r, h, _ = step(world, [HARVEST, STAY])
    assert r.tolist() == [1.0, 0.0]
    assert h.tolist() == [0.0, 0.0]
    assert world.state.stock[(2, 2)] == 2


def test_hazard_harm_regardless_of_action():
    for a in range(N_ACTIONS):
        world = make_world([(3, 3)], hazards={(3, 3)})
        _, _, h, _ = step(world, [a])
        assert h[0] == 1.0


def test_depletion_harm_requires_neighbor_and_scarcity():
    # last unit taken with a neighbor adjacent -> harm
    world = make_world([(2, 2), (3, 3)], stock={(2, 2): 1})
    _, r, h, _ = step(world, [HARVEST, STAY])
    assert r[0] == 1.0 and h[0] == 1.0 and h[1] == 0.0
    # same harvest without a neighbor -> no harm
    world = make_world([(2, 2), (6, 6)], stock={(2, 2): 1})
    _, _, h, _ = step(world, [HARVEST, STAY])
    assert h[0] == 0.0
    # neighbor present but stock stays above threshold -> no harm
    world = make_world([(2, 2), (2, 3)], stock={(2, 2): 3})
    _, _, h, _ = step(world, [HARVEST, STAY])
    assert h[0] == 0.0


def test_harvest_empty_cell_no_reward():
    world = make_world([(1, 1)], stock={(1, 1): 0})
    _, r, h, _ = step(world, [HARVEST])
    assert r[0] == 0.0 and h[0] == 0.0


def test_collisions_leave_agents_in_place():
    world = make_world([(1, 1), (3, 1)])
    step(world, [RIGHT, LEFT])
    assert world.agent_positions == [(1, 1), (3, 1)]


def test_move_into_occupied_cell_blocked():
    world = make_world([(1, 1), (2, 1)])
    step(world, [RIGHT, RIGHT])
    assert world.agent_positions == [(1, 1), (3, 1)]


def test_walls_block():
    world = make_world([(0, 0)], width=3, height=3)
    step(world, [LEFT])
    step(world, [DOWN])
    assert world.agent_positions == [(0, 0)]
    step(world, [UP])
    assert world.agent_positions == [(0, 1)]


def test_step_errors():
    world = make_world([(0, 0)], horizon=1)
    with pytest.raises(DomainError):
        step(world, [N_ACTIONS])
    with pytest.raises(DomainError):
        step(world, [STAY, STAY])
    _, _, _, done = step(world, [STAY])
    assert done
    with pytest.raises(StateError):
        step(world, [STAY])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_harm_is_function_of_transition(seed):
    """Two different joint actions that produce the same transition see the same harm."""
    rng = np.random.default_rng(seed)
    world, _ = reset(EnvConfig(n_hazards=12), seed)
    for _ in range(int(rng.integers(0, 20))):
        step(world, rng.integers(0, N_ACTIONS, 4))
    prev = world.state.copy()
    actions = rng.integers(0, N_ACTIONS, 4).tolist()
    twin = GridWorld(world.config, prev.copy(), world.episode_step, world.last_rewards.copy())
    _, r, h, _ = step(world, actions)
    # swap every move that went nowhere for STAY: different actions, same state transition
    alt = [STAY if a not in (HARVEST, STAY) and world.state.positions[i] == prev.positions[i] else a
           for i, a in enumerate(actions)]
    _, r2, h2, _ = step(twin, alt)
    if twin.state == world.state:
        assert np.array_equal(h, h2)
        assert np.array_equal(r, r2)
    assert np.array_equal(h, harm_from_transition(world.config, prev, actions, world.state))


def test_blocked_move_and_stay_same_harm():
    for a in (LEFT, DOWN, STAY):
        world = make_world([(0, 0), (1, 1)], hazards={(0, 0)})
        _, _, h, _ = step(world, [a, STAY])
        assert h.tolist() == [1.0, 0.0]


def test_rollout_bounds_and_observation_range():
    cfg = EnvConfig(horizon=100, n_hazards=10, n_resources=10)
    rng = np.random.default_rng(0)
    max_h, max_z, steps = 0.0, 0.0, 0
    while steps < 10_000:
        world, obs = reset(cfg, steps)
        max_z = max(max_z, np.abs(obs).max())
        while not world.done:
            obs, _, h, _ = step(world, rng.integers(0, N_ACTIONS, cfg.n_agents))
            max_h = max(max_h, h.max())
            max_z = max(max_z, np.abs(obs).max())
            steps += 1
    assert max_h <= cfg.h_max
    assert max_z <= 1.0


def test_trajectory_deterministic():
    cfg = EnvConfig()
    acts = np.random.default_rng(5).integers(0, N_ACTIONS, (cfg.horizon, cfg.n_agents))

    def run():
        world, obs = reset(cfg, 9)
        out = [obs]
        for a in acts:
            o, r, h, _ = step(world, a)
            out += [o, r, h]
        return out

    for a, b in zip(run(), run()):
        assert np.array_equal(a, b)


def test_observation_layout():
    world = make_world([(1, 1), (2, 2)], stock={(0, 1): 3}, hazards={(1, 0)}, width=4, height=4)
    z = observe(world)[0]
    assert z[0] == pytest.approx(2 * 1 / 3 - 1)
    # patch rows run dy = +1, 0, -1; columns dx = -1, 0, +1
    patch = z[2:11].reshape(3, 3)
    assert patch[0, 2] == env._AGENT
    assert patch[1, 0] == env._RESOURCE
    assert patch[2, 1] == env._HAZARD
    assert z[11] == 1.0
    assert z[13] == pytest.approx(1 / 8)
