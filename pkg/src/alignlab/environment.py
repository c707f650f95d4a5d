"""Multi-agent resource gridworld with an exogenous, bounded harm signal.

Agents move on a grid, harvest resource cells and may step onto hazards.
Harm is a pure function of a transition ``(s_t, a_t, s_{t+1})``:

* ``w_hazard`` if the agent starts the step on a hazard cell;
* ``w_deplete`` if the agent harvests the last scarce units of a resource
  while another agent stands next to it.

so ``0 <= h <= w_hazard + w_deplete`` by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError, StateError

UP, DOWN, LEFT, RIGHT, STAY, HARVEST = range(6)
ACTION_NAMES = ("up", "down", "left", "right", "stay", "harvest")
N_ACTIONS = len(ACTION_NAMES)
OBS_DIM = 16

_MOVES = {UP: (0, 1), DOWN: (0, -1), LEFT: (-1, 0), RIGHT: (1, 0)}

# cell codes for the 3x3 patch; all within [-1, 1]
_WALL, _HAZARD, _AGENT, _RESOURCE = -1.0, -0.5, 0.25, 0.5


@dataclass
class EnvConfig:
    width: int = 8
    height: int = 8
    n_agents: int = 4
    horizon: int = 64
    n_resources: int = 6
    n_hazards: int = 4
    initial_stock: int = 3
    w_hazard: float = 1.0
    w_deplete: float = 1.0
    scarcity_threshold: float = 1.0

    @property
    def h_max(self):
        return self.w_hazard + self.w_deplete

    def validate(self):
        for name in ("width", "height", "n_agents", "horizon", "initial_stock"):
            if getattr(self, name) < 1:
                raise ConfigError("must be >= 1", f"environment.{name}")
        for name in ("n_resources", "n_hazards"):
            if getattr(self, name) < 0:
                raise ConfigError("must be >= 0", f"environment.{name}")
        for name in ("w_hazard", "w_deplete", "scarcity_threshold"):
            if getattr(self, name) < 0:
                raise ConfigError("must be nonnegative", f"environment.{name}")
        cells = self.width * self.height
        if self.n_agents + self.n_resources + self.n_hazards > cells:
            raise ConfigError(
                f"{self.n_agents} agents + {self.n_resources} resources + "
                f"{self.n_hazards} hazards do not fit a {self.width}x{self.height} grid",
                "environment",
            )


@dataclass
class WorldState:
    """Snapshot of everything harm and reward depend on."""

    positions: list
    stock: dict
    hazards: frozenset

    def copy(self):
        return WorldState(list(self.positions), dict(self.stock), self.hazards)


@dataclass
class GridWorld:
    config: EnvConfig
    state: WorldState
    episode_step: int = 0
    last_rewards: np.ndarray = field(default=None)

    @property
    def n_agents(self):
        return self.config.n_agents

    @property
    def done(self):
        return self.episode_step >= self.config.horizon

    @property
    def agent_positions(self):
        return list(self.state.positions)


def reset(config: EnvConfig, seed: int):
    """Deterministic layout for ``seed``; returns ``(world, observations)``."""
    config.validate()
    rng = np.random.default_rng(seed)
    n_cells = config.width * config.height
    picks = rng.choice(n_cells, size=config.n_agents + config.n_resources + config.n_hazards, replace=False)
    cells = [(int(c % config.width), int(c // config.width)) for c in picks]
    na, nr = config.n_agents, config.n_resources
    state = WorldState(
        positions=cells[:na],
        stock={c: config.initial_stock for c in cells[na:na + nr]},
        hazards=frozenset(cells[na + nr:]),
    )
    world = GridWorld(config, state, 0, np.zeros(na))
    return world, observe(world)


def _in_bounds(cfg, cell):
    return 0 <= cell[0] < cfg.width and 0 <= cell[1] < cfg.height


def _adjacent(a, b):
    return a != b and max(abs(a[0] - b[0]), abs(a[1] - b[1])) <= 1


def _resolve(cfg: EnvConfig, prev: WorldState, joint_action):
    """Next state plus per-agent harvest success, synchronous semantics."""
    n = len(prev.positions)
    occupied = set(prev.positions)
    targets = []
    for i, a in enumerate(joint_action):
        pos = prev.positions[i]
        if a in _MOVES:
            dx, dy = _MOVES[a]
            cand = (pos[0] + dx, pos[1] + dy)
            targets.append(cand if _in_bounds(cfg, cand) and cand not in occupied else pos)
        else:
            targets.append(pos)
    counts = {}
    for t in targets:
        counts[t] = counts.get(t, 0) + 1
    positions = [t if counts[t] == 1 else prev.positions[i] for i, t in enumerate(targets)]

    stock = dict(prev.stock)
    harvested = np.zeros(n, dtype=bool)
    for i in range(n):  # lowest index harvests first
        cell = prev.positions[i]
        if joint_action[i] == HARVEST and stock.get(cell, 0) > 0:
            stock[cell] -= 1
            harvested[i] = True
    return WorldState(positions, stock, prev.hazards), harvested


def harm_from_transition(cfg: EnvConfig, prev: WorldState, joint_action, nxt: WorldState):
    """Per-agent harm; depends on nothing but the transition itself."""
    n = len(prev.positions)
    h = np.zeros(n)
    for i in range(n):
        cell = prev.positions[i]
        if cell in prev.hazards:
            h[i] += cfg.w_hazard
        if joint_action[i] == HARVEST and prev.stock.get(cell, 0) > 0:
            depleting = nxt.stock[cell] < cfg.scarcity_threshold
            crowded = any(_adjacent(nxt.positions[j], cell) for j in range(n) if j != i)
            if depleting and crowded:
                h[i] += cfg.w_deplete
    return h


def step(world: GridWorld, joint_action):
    """Advance one step in place.

    Returns ``(observations, extrinsic_rewards, harms, done)``.
    """
    if world.done:
        raise StateError("episode is done; call reset()")
    joint_action = [int(a) for a in joint_action]
    if len(joint_action) != world.n_agents:
        raise DomainError(f"expected {world.n_agents} actions, got {len(joint_action)}")
    for a in joint_action:
        if not 0 <= a < N_ACTIONS:
            raise DomainError(f"invalid action index {a}")
    prev = world.state
    nxt, harvested = _resolve(world.config, prev, joint_action)
    harms = harm_from_transition(world.config, prev, joint_action, nxt)
    rewards = harvested.astype(float)
    world.state = nxt
    world.episode_step += 1
    world.last_rewards = rewards
    return observe(world), rewards, harms, world.done


def _nearest_stock(cfg, state, pos):
    best, best_d = 0, None
    for cell, s in sorted(state.stock.items()):
        if s <= 0:
            continue
        d = abs(cell[0] - pos[0]) + abs(cell[1] - pos[1])
        if best_d is None or d < best_d:
            best, best_d = s, d
    return best / cfg.initial_stock


def observe(world: GridWorld):
    """One length-16 vector per agent, all entries in [-1, 1].

    Layout: normalized (x, y); 3x3 patch codes (row-major, dy from +1 to -1);
    nearest live resource stock; last extrinsic reward; fractions of patch
    cells holding agents, live resources and hazards.
    """
    cfg, st = world.config, world.state
    occupied = set(st.positions)
    obs = np.zeros((world.n_agents, OBS_DIM))
    for i, pos in enumerate(st.positions):
        z = obs[i]
        z[0] = 2.0 * pos[0] / max(cfg.width - 1, 1) - 1.0
        z[1] = 2.0 * pos[1] / max(cfg.height - 1, 1) - 1.0
        n_ag = n_res = n_haz = 0
        k = 2
        for dy in (1, 0, -1):
            for dx in (-1, 0, 1):
                cell = (pos[0] + dx, pos[1] + dy)
                if not _in_bounds(cfg, cell):
                    z[k] = _WALL
                else:
                    code = 0.0
                    if cell in occupied and cell != pos:
                        code += _AGENT
                        n_ag += 1
                    if st.stock.get(cell, 0) > 0:
                        code += _RESOURCE
                        n_res += 1
                    if cell in st.hazards:
                        code += _HAZARD
                        n_haz += 1
                    z[k] = code
                k += 1
        z[11] = _nearest_stock(cfg, st, pos)
        z[12] = world.last_rewards[i]
        z[13] = n_ag / 8.0
        z[14] = n_res / 9.0
        z[15] = n_haz / 9.0
    return obs
