from __future__ import absolute_import
from __future__ import division
import collections
import csv
import json
import logging
import numpy as np
from phstair.errors import DomainError, PreconditionError


# Recorded in verification reports so a run can be reproduced.
GENERATOR_NAME = "numpy.random.PCG64 seeded by SeedSequence(master_seed, spawn_key=(path_index,))"

logger = logging.getLogger(__name__)


class SeedSpec(collections.namedtuple("SeedSpec", ["master_seed", "path_index"])):
    # Names the random substream of one path, fixed by (master_seed,
    # path_index) alone.
    __slots__ = ()

    def __new__(cls, master_seed, path_index=0):
        master_seed = int(master_seed)
        path_index = int(path_index)
        if not 0 <= master_seed < 2 ** 64:
            raise PreconditionError("master_seed must be a 64-bit unsigned integer, got %d." % master_seed)
        if path_index < 0:
            raise PreconditionError("path_index must be nonnegative, got %d." % path_index)
        return super(SeedSpec, cls).__new__(cls, master_seed, path_index)

    def generator(self):
        sequence = np.random.SeedSequence(self.master_seed, spawn_key=(self.path_index,))
        return np.random.Generator(np.random.PCG64(sequence))


class Path(object):
    # One realized trajectory X_0..X_n with its jump indicators and the
    # (u_jump, u_level) pairs that produced each step.
    def __init__(self, states, jumps, uniforms, index=0):
        self.states = states
        self.jumps = jumps
        self.uniforms = uniforms
        self.index = index

    @property
    def n(self):
        return len(self.jumps)

    @property
    def count(self):
        return sum(self.jumps)

    @property
    def partial_sum(self):
        return sum(self.states[1:])

    def violations(self):
        problems = []
        if len(self.states) != self.n + 1:
            problems.append("expected %d states, found %d" % (self.n + 1, len(self.states)))
        for i, state in enumerate(self.states):
            if not state > 0:
                problems.append("state %d is not positive: %r" % (i, state))
        for i in range(1, len(self.states)):
            previous, current = self.states[i - 1], self.states[i]
            if current > previous:
                problems.append("state %d increases: %r > %r" % (i, current, previous))
            if self.jumps[i - 1] != int(current < previous):
                problems.append("jump indicator %d disagrees with states" % i)
        return problems

    def to_dict(self):
        return {"index": self.index,
                "states": [float(state) for state in self.states],
                "jumps": [int(jump) for jump in self.jumps]}

    def __repr__(self):
        return "Path(index=%d, n=%d, count=%d)" % (self.index, self.n, self.count)


def step(x, p, u_jump, u_level):
    # Advance the chain one step from x. A jump happens when u_jump < p*x and
    # lands at x*u_level, otherwise the chain stays at x.
    if not 0 < x <= 1:
        raise DomainError("State must lie in (0, 1], got %r." % (x,))
    if u_jump < p * x:
        return x * u_level
    return x


def draw_uniforms(rng, n):
    # Draw the n (u_jump, u_level) pairs of one path. u_jump lies in [0, 1); a
    # landing level of exactly 0 is redrawn so states stay positive.
    uniforms = rng.random((n, 2))
    while True:
        zeros = uniforms[:, 1] == 0.0
        if not zeros.any():
            return uniforms
        uniforms[zeros, 1] = rng.random(int(zeros.sum()))


def _check_start(n, x0):
    if n < 0:
        raise PreconditionError("Horizon n must be nonnegative, got %d." % n)
    if not 0 < x0 <= 1:
        raise DomainError("Initial state must lie in (0, 1], got %r." % (x0,))


def simulate_path(params, n, seed, x0=1.0):
    _check_start(n, x0)
    p = params.p_float
    uniforms = draw_uniforms(seed.generator(), n)
    states = [float(x0)]
    jumps = []
    for u_jump, u_level in uniforms:
        x = states[-1]
        next_x = step(x, p, u_jump, u_level)
        states.append(next_x)
        jumps.append(int(next_x < x))
    return Path(states, jumps, uniforms, index=seed.path_index)


def simulate_batch(params, n, m, master_seed, x0=1.0):
    # Yield m independent paths, path i drawn from substream (master_seed, i).
    if m < 1:
        raise PreconditionError("Path count m must be at least 1, got %d." % m)
    for i in range(m):
        yield simulate_path(params, n, SeedSpec(master_seed, i), x0)


class Ensemble(object):
    # Array form of a batch: row i holds the same path simulate_path returns
    # for SeedSpec(master_seed, i).
    def __init__(self, states, jumps, master_seed):
        self.states = states
        self.jumps = jumps
        self.master_seed = master_seed

    def __len__(self):
        return self.states.shape[0]

    @property
    def n(self):
        return self.jumps.shape[1]

    def final_states(self):
        return self.states[:, -1]

    def _check_horizon(self, k):
        if not 0 <= k <= self.n:
            raise PreconditionError("Step %d lies outside the simulated horizon 0..%d." % (k, self.n))

    def states_at(self, k):
        self._check_horizon(k)
        return self.states[:, k]

    def counts(self, k=None):
        # N_k for every path, N_n when k is omitted.
        if k is None:
            k = self.n
        self._check_horizon(k)
        return self.jumps[:, :k].sum(axis=1)

    def partial_sums(self, k=None):
        # S_k = X_1 + ... + X_k for every path, S_n when k is omitted.
        if k is None:
            k = self.n
        self._check_horizon(k)
        return self.states[:, 1:k + 1].sum(axis=1)

    def paths(self):
        for i in range(len(self)):
            yield Path(list(self.states[i]), [int(jump) for jump in self.jumps[i]], None, index=i)


def simulate_ensemble(params, n, m, master_seed, x0=1.0):
    _check_start(n, x0)
    if m < 1:
        raise PreconditionError("Path count m must be at least 1, got %d." % m)
    logger.debug("Simulating %d paths of %d steps with p=%s", m, n, params.p)
    p = params.p_float
    uniforms = np.empty((m, n, 2))
    for i in range(m):
        uniforms[i] = draw_uniforms(SeedSpec(master_seed, i).generator(), n)

    states = np.empty((m, n + 1))
    states[:, 0] = x0
    jumps = np.zeros((m, n), dtype=np.int8)
    for k in range(n):
        x = states[:, k]
        jump = uniforms[:, k, 0] < p * x
        states[:, k + 1] = np.where(jump, x * uniforms[:, k, 1], x)
        jumps[:, k] = jump
    return Ensemble(states, jumps, master_seed)


def write_paths_json(paths, fd):
    for path in paths:
        fd.write(json.dumps(path.to_dict()) + "\n")


def write_paths_csv(paths, fd):
    writer = csv.writer(fd, lineterminator="\n")
    writer.writerow(["path", "step", "state", "jump"])
    for path in paths:
        for i, state in enumerate(path.states):
            jump = "" if i == 0 else int(path.jumps[i - 1])
            writer.writerow([path.index, i, "%.17g" % state, jump])
