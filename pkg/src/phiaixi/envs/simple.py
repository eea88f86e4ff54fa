"""Small benchmark domains: biased RPS, Jackpot, Stop Heist, Taxi and fixtures."""
from __future__ import annotations

import math

from ..core import SymbolSpace
from .base import Environment, Percept
from .hawkes import HawkesParams, HawkesState

ROCK, PAPER, SCISSORS = 0, 1, 2


def rps_outcome(agent: int, env: int) -> int:
    """+1 if the agent wins, 0 on a draw, -1 on a loss."""
    if agent == env:
        return 0
    return 1 if (agent - env) % 3 == 1 else -1


class BiasedRps(Environment):
    """The opponent plays uniformly unless it just won with rock, then it repeats rock."""

    env_id = "rps"
    num_actions = 3
    action_names = ("rock", "paper", "scissors")
    observation_space = SymbolSpace(3)
    reward_space = SymbolSpace.of_values((-1.0, 0.0, 1.0))

    def _reset(self):
        self.last_env = None
        self.last_reward = 0
        return 0

    def _step(self, action: int) -> Percept:
        if self.last_env == ROCK and self.last_reward == -1:
            move = ROCK
        else:
            move = int(self.rng.integers(3))
        r = rps_outcome(action, move)
        self.last_env, self.last_reward = move, r
        return Percept(move, float(r))


class Jackpot(Environment):
    """Betting on a multiple of a listed number pays +1 w.p. 0.7, otherwise -1 w.p. 0.7.

    The step index is the number of completed cycles before the current
    action, so a predicate on Count(h) sees exactly the index being judged.
    """

    env_id = "jackpot"
    num_actions = 2
    action_names = ("pass", "bet")
    observation_space = SymbolSpace(1)
    reward_space = SymbolSpace.of_values((-1.0, 0.0, 1.0))

    def __init__(self, seed: int = 0, multiples=(3, 5), win_prob: float = 0.7):
        super().__init__(seed)
        self.multiples = tuple(multiples)
        self.win_prob = win_prob

    def _reset(self):
        self.t = 0
        return 0

    def is_lucky(self, t: int) -> bool:
        return any(t % j == 0 for j in self.multiples)

    def _step(self, action: int) -> Percept:
        r = 0.0
        if action == 1:
            hit = self.rng.random() < self.win_prob
            if hit:
                r = 1.0 if self.is_lucky(self.t) else -1.0
        self.t += 1
        return Percept(0, r)


class StopHeist(Environment):
    """Suspect arrivals follow a Hawkes process; heists only happen on arrival steps.

    The heist probability on an arrival is 1 - exp(-lambda_h) where lambda_h is
    a second self-exciting intensity driven by the same arrivals.
    """

    env_id = "stopheist"
    num_actions = 2
    action_names = ("nothing", "stop")
    observation_space = SymbolSpace(2)
    reward_space = SymbolSpace.of_values((-100.0, -1.0, 0.0, 100.0))

    def __init__(self, seed: int = 0, arrivals: HawkesParams = HawkesParams(),
                 heist: HawkesParams = HawkesParams(mu0=0.0, alpha=0.15, beta=0.15)):
        super().__init__(seed)
        self.arrival_params = arrivals
        self.heist_params = heist

    def _reset(self):
        self.arrivals = HawkesState(self.arrival_params)
        self.heist_drive = HawkesState(self.heist_params)
        return 0

    def _step(self, action: int) -> Percept:
        lam = self.arrivals.intensity()
        arrived = self.rng.random() < 1.0 - math.exp(-lam)
        heist = False
        if arrived:
            heist = self.rng.random() < 1.0 - math.exp(-self.heist_drive.intensity())
        self.arrivals.advance(arrived)
        self.heist_drive.advance(arrived)
        if heist:
            r = 100.0 if action == 1 else -100.0
        else:
            r = -1.0 if action == 1 else 0.0
        return Percept(int(arrived), r, info={"heist": heist})


class Taxi(Environment):
    """2x5 open grid, four corner stands; +100 for a correct dropoff, -10 illegal, -1 per step."""

    env_id = "taxi"
    num_actions = 6
    action_names = ("north", "south", "east", "west", "pickup", "dropoff")
    ROWS, COLS = 2, 5
    STANDS = ((0, 0), (0, 4), (1, 0), (1, 4))
    IN_TAXI = 4
    observation_space = SymbolSpace(200)
    reward_space = SymbolSpace.of_values((-10.0, -1.0, 100.0))

    def __init__(self, seed: int = 0, max_steps: int = 200):
        super().__init__(seed)
        self.max_steps = max_steps

    def _new_episode(self):
        self.pos = (int(self.rng.integers(self.ROWS)), int(self.rng.integers(self.COLS)))
        self.passenger = int(self.rng.integers(4))
        self.dest = int((self.passenger + 1 + self.rng.integers(3)) % 4)
        self.steps = 0

    def _reset(self):
        self._new_episode()
        return self._obs()

    def _obs(self) -> int:
        return ((self.pos[0] * self.COLS + self.pos[1]) * 5 + self.passenger) * 4 + self.dest

    @classmethod
    def decode(cls, obs: int) -> tuple[tuple[int, int], int, int]:
        dest = obs % 4
        passenger = (obs // 4) % 5
        cell = obs // 20
        return (cell // cls.COLS, cell % cls.COLS), passenger, dest

    def _step(self, action: int) -> Percept:
        r, done = -1.0, False
        row, col = self.pos
        if action == 0:
            row = max(row - 1, 0)
        elif action == 1:
            row = min(row + 1, self.ROWS - 1)
        elif action == 2:
            col = min(col + 1, self.COLS - 1)
        elif action == 3:
            col = max(col - 1, 0)
        elif action == 4:
            if self.passenger != self.IN_TAXI and self.STANDS[self.passenger] == self.pos:
                self.passenger = self.IN_TAXI
            else:
                r = -10.0
        else:
            if self.passenger == self.IN_TAXI and self.STANDS[self.dest] == self.pos:
                r, done = 100.0, True
            else:
                r = -10.0
        self.pos = (row, col)
        self.steps += 1
        truncated = not done and self.steps >= self.max_steps
        if done or truncated:
            self._new_episode()
        return Percept(self._obs(), r, done or truncated, {"success": done, "truncated": truncated})


class SwitchingEnv(Environment):
    """Two observations that swap w.p. 0.1; a swap pays 1 w.p. 0.1, anything else pays 0."""

    env_id = "switching"
    num_actions = 1
    observation_space = SymbolSpace(2)
    reward_space = SymbolSpace.of_values((0.0, 1.0))

    def __init__(self, seed: int = 0, switch_prob: float = 0.1, reward_prob: float = 0.1):
        super().__init__(seed)
        self.switch_prob = switch_prob
        self.reward_prob = reward_prob

    def _reset(self):
        self.obs = 0
        return 0

    def _step(self, action: int) -> Percept:
        flip = self.rng.random() < self.switch_prob
        if flip:
            self.obs = 1 - self.obs
        r = 1.0 if flip and self.rng.random() < self.reward_prob else 0.0
        return Percept(self.obs, r, info={"switched": flip})


class ConstantEnv(Environment):
    env_id = "constant"
    num_actions = 2
    observation_space = SymbolSpace(1)

    def __init__(self, seed: int = 0, reward: float = 1.0):
        super().__init__(seed)
        self.reward = reward
        self.reward_space = SymbolSpace.of_values((reward,))

    def _reset(self):
        return 0

    def _step(self, action: int) -> Percept:
        return Percept(0, self.reward)
