"""Adversary strategies.

The separation guarantees quantify over every ball the shrinking player
may pick, so the tests need adversaries that actually push back: a greedy
white-box player that steers toward the points the other side is trying
to avoid, a seeded uniform player for fuzzing, and replay players that
re-validate a stored transcript move for move.
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import SpecError
from .fractal import FractalSupport, find_point_in_gap
from .game import Ball, GameParams, Transcript

__all__ = ["AdversaryConfig", "greedy_move", "random_move",
           "KeepCenterBob", "GreedyBob", "RandomBob", "ReplayPlayer",
           "make_bob"]


def _legal_range(ball: Ball, ratio: Fraction) -> Tuple[Fraction, Fraction]:
    slack = (1 - ratio) * ball.radius
    return ball.center - slack, ball.center + slack


def greedy_move(support: FractalSupport, alice_ball: Ball, params: GameParams,
                targets: Sequence[Fraction]) -> Ball:
    """Center the reply as close to the nearest target as legality allows.

    The target list is whatever the other player wants to stay away from;
    moving toward it forces the avoidance machinery to do real work.  With
    no targets, or when no support point improves on the current center,
    keeps the center.
    """
    radius = params.beta * alice_ball.radius
    if not targets:
        return Ball(alice_ball.center, radius, alice_ball.word)
    lo, hi = _legal_range(alice_ball, params.beta)
    goal = min((Fraction(t) for t in targets),
               key=lambda t: abs(t - alice_ball.center))
    desired = min(max(goal, lo), hi)
    best = (alice_ball.center, alice_ball.word)
    width = hi - lo
    # shrinking search windows around the clipped goal; the first hit in a
    # small window is nearly optimal, wider windows only rescue sparse spots
    for k in range(12, -1, -1):
        w = width / 2 ** k
        got = find_point_in_gap(support, (max(desired - w, lo),
                                          min(desired + w, hi)), [])
        if got is not None:
            x, word = got
            if abs(x - goal) < abs(best[0] - goal):
                best = (x, word)
            break
    if abs(best[0] - goal) > abs(alice_ball.center - goal):
        best = (alice_ball.center, alice_ball.word)
    return Ball(best[0], radius, best[1])


def random_move(support: FractalSupport, alice_ball: Ball, params: GameParams,
                seed) -> Ball:
    """Uniformly pick a legal cylinder point as the new center.

    Candidates are the canonical points of the deepest cylinder layer that
    still fits inside the legal center range; the choice is deterministic
    in the seed.  Falls back to keeping the center when no cylinder fits.
    """
    radius = params.beta * alice_ball.radius
    lo, hi = _legal_range(alice_ball, params.beta)
    slack = hi - lo
    if slack == 0:
        return Ball(alice_ball.center, radius, alice_ball.word)
    depth, size = 0, support.diameter
    while size * 4 > slack and depth < 64:
        depth += 1
        size *= support.contraction
    cands = [c for c in support.cylinders_meeting(lo, hi, depth)
             if lo <= c.lo and c.hi <= hi]
    if not cands:
        return Ball(alice_ball.center, radius, alice_ball.word)
    rng = random.Random(str(seed))
    cyl = cands[rng.randrange(len(cands))]
    return Ball(support.point(cyl.word), radius, cyl.word)


class KeepCenterBob:
    """The laziest legal adversary."""

    def move(self, support, params, transcript) -> Ball:
        prev = transcript.last_ball
        return Ball(prev.center, params.beta * prev.radius, prev.word)


class GreedyBob:
    """White-box adversary: steers toward the opponent's danger points.

    ``alice`` is the strategy object being stressed; its danger_preview
    (when it has one) names the points it is currently trying to clear.
    A static target list can be supplied instead.
    """

    def __init__(self, alice=None, targets: Optional[Sequence[Fraction]] = None):
        self.alice = alice
        self.targets = [Fraction(t) for t in targets] if targets else []

    def move(self, support, params, transcript) -> Ball:
        targets = list(self.targets)
        if self.alice is not None and hasattr(self.alice, "danger_preview"):
            targets.extend(self.alice.danger_preview(support, params, transcript))
        return greedy_move(support, transcript.last_ball, params, targets)


class RandomBob:
    """Seeded uniform adversary; the move stream is a pure function of seed."""

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.count = 0

    def move(self, support, params, transcript) -> Ball:
        self.count += 1
        return random_move(support, transcript.last_ball, params,
                           "%s/%d" % (self.seed, self.count))


class ReplayPlayer:
    """Re-plays one side of a stored transcript; the referee re-validates."""

    def __init__(self, transcript: Transcript, player: str):
        if player not in ("alice", "bob"):
            raise SpecError("player must be 'alice' or 'bob'")
        self.balls = [b for p, b in transcript.moves if p == player]
        if player == "bob":
            self.balls = self.balls[1:]  # the opening is the engine's
        self.next = 0

    def move(self, support, params, transcript) -> Ball:
        if self.next >= len(self.balls):
            raise SpecError("replay transcript exhausted")
        ball = self.balls[self.next]
        self.next += 1
        return ball


@dataclass
class AdversaryConfig:
    kind: str = "keep"
    seed: int = 0
    target_points: List[Fraction] = field(default_factory=list)
    transcript: Optional[Transcript] = None

    def __post_init__(self):
        if self.kind not in ("keep", "greedy", "random", "replay"):
            raise SpecError("unknown adversary kind %r" % self.kind)
        if self.kind == "replay" and self.transcript is None:
            raise SpecError("replay adversary needs a transcript")


def make_bob(config: AdversaryConfig, alice=None):
    if config.kind == "keep":
        return KeepCenterBob()
    if config.kind == "greedy":
        return GreedyBob(alice=alice, targets=config.target_points)
    if config.kind == "random":
        return RandomBob(config.seed)
    return ReplayPlayer(config.transcript, "bob")
