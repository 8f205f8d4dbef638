"""Barter instances, allocations and their net-value semantics.

Every quantity that carries value (item values, weights, fairness floors) is
held as a :class:`fractions.Fraction` so balance checks are exact.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Mapping

ITEM_VALUE = "item_value"
UNIT = "unit"


class ValidationError(ValueError):
    """An instance violates one of its structural invariants."""


class InvalidTransfer(ValueError):
    """An allocation moves an item the giver lacks or the receiver does not want."""


def to_fraction(value) -> Fraction:
    """Parse ints, Fractions, Decimals and ``"p/q"`` / decimal strings exactly.

    Floats go through their shortest repr, so ``0.1`` becomes ``1/10``.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not numeric values here")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Decimal)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact number: {value!r}") from exc
    raise TypeError(f"unsupported numeric type {type(value).__name__}")


def format_fraction(value: Fraction) -> str:
    """Lowest-terms ``"p/q"`` (or ``"p"`` for integers)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class ItemSpec:
    item_id: str
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", to_fraction(self.value))


@dataclass(frozen=True)
class AgentSpec:
    """An agent's have-list and wish-list, each mapping item id to a capacity."""

    agent_id: str
    have: Mapping[str, int] = field(default_factory=dict)
    wish: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        # accept plain iterables of ids as unit-capacity lists
        for name in ("have", "wish"):
            raw = getattr(self, name)
            if not isinstance(raw, Mapping):
                raw = {item: 1 for item in raw}
            object.__setattr__(self, name, dict(raw))


@dataclass(frozen=True)
class TransferWeight:
    """Utility of a single transfer ``(giver, receiver, item)``.

    ``rule`` is ``"item_value"`` (w = v_j) or ``"unit"`` (w = 1).  Entries in
    ``explicit`` override the rule for their triple.
    """

    rule: str = ITEM_VALUE
    explicit: Mapping[tuple[str, str, str], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if self.rule not in (ITEM_VALUE, UNIT):
            raise ValidationError(f"unknown weight rule {self.rule!r}")
        object.__setattr__(
            self, "explicit", {tuple(k): to_fraction(v) for k, v in self.explicit.items()}
        )

    def weight(self, giver: str, receiver: str, item: str, value: Fraction) -> Fraction:
        w = self.explicit.get((giver, receiver, item))
        if w is not None:
            return w
        return value if self.rule == ITEM_VALUE else Fraction(1)


@dataclass(frozen=True)
class FairnessGroup:
    """Group of agents promised at least ``floor`` received value in expectation."""

    agents: frozenset[str]
    floor: Fraction

    def __post_init__(self):
        object.__setattr__(self, "agents", frozenset(self.agents))
        object.__setattr__(self, "floor", to_fraction(self.floor))


@dataclass(frozen=True)
class BarterInstance:
    items: tuple[ItemSpec, ...]
    agents: tuple[AgentSpec, ...]
    weights: TransferWeight = field(default_factory=TransferWeight)
    fairness: tuple[FairnessGroup, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "fairness", tuple(self.fairness))

    @property
    def values(self) -> dict[str, Fraction]:
        return {it.item_id: it.value for it in self.items}

    def agent(self, agent_id: str) -> AgentSpec:
        for a in self.agents:
            if a.agent_id == agent_id:
                return a
        raise KeyError(agent_id)

    def weight(self, giver: str, receiver: str, item: str) -> Fraction:
        return self.weights.weight(giver, receiver, item, self.values[item])

    def v_star(self, agent_id: str) -> Fraction:
        """Most valuable item among the agent's owned and wished items (0 if none)."""
        a = self.agent(agent_id)
        vals = self.values
        return max((vals[j] for j in (*a.have, *a.wish)), default=Fraction(0))

    def with_weights(self, weights: TransferWeight) -> "BarterInstance":
        return BarterInstance(self.items, self.agents, weights, self.fairness)

    def without_fairness(self) -> "BarterInstance":
        return BarterInstance(self.items, self.agents, self.weights, ())


@dataclass(frozen=True, order=True)
class Transfer:
    giver: str
    receiver: str
    item: str
    count: int = 1


@dataclass(frozen=True)
class Allocation:
    """A multiset of transfers, kept sorted by (giver, receiver, item)."""

    transfers: tuple[Transfer, ...] = ()

    def __post_init__(self):
        merged: dict[tuple[str, str, str], int] = defaultdict(int)
        for t in self.transfers:
            merged[(t.giver, t.receiver, t.item)] += t.count
        object.__setattr__(
            self,
            "transfers",
            tuple(Transfer(g, r, j, c) for (g, r, j), c in sorted(merged.items()) if c),
        )

    def __len__(self):
        return len(self.transfers)

    @property
    def is_empty(self) -> bool:
        return not self.transfers


@dataclass(frozen=True)
class NetValueReport:
    given: Mapping[str, Fraction]
    received: Mapping[str, Fraction]
    utility: Fraction

    @property
    def net(self) -> dict[str, Fraction]:
        """Net value loss D_i = given - received for every agent."""
        return {a: self.given[a] - self.received[a] for a in self.given}

    @property
    def balanced(self) -> bool:
        return all(d == 0 for d in self.net.values())


def validate_instance(instance: BarterInstance) -> BarterInstance:
    """Return ``instance`` unchanged, or raise :class:`ValidationError`."""
    item_ids = [it.item_id for it in instance.items]
    if len(set(item_ids)) != len(item_ids):
        raise ValidationError("duplicate item id")
    for it in instance.items:
        if it.value <= 0:
            raise ValidationError(f"non-positive value for item {it.item_id!r}: {it.value}")
    known = set(item_ids)
    agent_ids = [a.agent_id for a in instance.agents]
    if len(set(agent_ids)) != len(agent_ids):
        raise ValidationError("duplicate agent id")
    for a in instance.agents:
        for kind in ("have", "wish"):
            for item, cap in getattr(a, kind).items():
                if item not in known:
                    raise ValidationError(
                        f"dangling item id {item!r} in {kind} list of agent {a.agent_id!r}"
                    )
                if isinstance(cap, bool) or not isinstance(cap, int) or cap < 1:
                    raise ValidationError(
                        f"capacity of {item!r} in {kind} list of agent {a.agent_id!r} "
                        f"must be a positive integer, got {cap!r}"
                    )
    agents = set(agent_ids)
    for (giver, receiver, item) in instance.weights.explicit:
        if giver not in agents or receiver not in agents:
            raise ValidationError(f"weight entry names unknown agent: {(giver, receiver, item)}")
        if item not in instance.agent(giver).have or item not in instance.agent(receiver).wish:
            raise ValidationError(
                f"weight entry {(giver, receiver, item)} is not a possible transfer"
            )
    for k, group in enumerate(instance.fairness):
        if not group.agents <= agents:
            raise ValidationError(f"fairness group {k} names unknown agents")
        if group.floor < 0:
            raise ValidationError(f"fairness group {k} has a negative floor")
    return instance


def check_allocation(instance: BarterInstance, alloc: Allocation) -> None:
    """Raise :class:`InvalidTransfer` unless every transfer is permitted and within caps."""
    agents = {a.agent_id: a for a in instance.agents}
    out: dict[tuple[str, str], int] = defaultdict(int)
    inc: dict[tuple[str, str], int] = defaultdict(int)
    for t in alloc.transfers:
        if t.giver not in agents or t.receiver not in agents:
            raise InvalidTransfer(f"unknown agent in {t}")
        if t.giver == t.receiver:
            raise InvalidTransfer(f"self-transfer {t}")
        if t.count < 1:
            raise InvalidTransfer(f"non-positive count in {t}")
        if t.item not in agents[t.giver].have:
            raise InvalidTransfer(f"{t.giver!r} does not own {t.item!r}")
        if t.item not in agents[t.receiver].wish:
            raise InvalidTransfer(f"{t.receiver!r} does not wish for {t.item!r}")
        out[(t.giver, t.item)] += t.count
        inc[(t.receiver, t.item)] += t.count
    for (g, j), n in out.items():
        if n > agents[g].have[j]:
            raise InvalidTransfer(f"{g!r} gives {n} copies of {j!r}, owns {agents[g].have[j]}")
    for (r, j), n in inc.items():
        if n > agents[r].wish[j]:
            raise InvalidTransfer(f"{r!r} receives {n} copies of {j!r}, wants {agents[r].wish[j]}")


def evaluate_allocation(instance: BarterInstance, alloc: Allocation) -> NetValueReport:
    check_allocation(instance, alloc)
    values = instance.values
    given = {a.agent_id: Fraction(0) for a in instance.agents}
    received = dict(given)
    utility = Fraction(0)
    for t in alloc.transfers:
        v = values[t.item] * t.count
        given[t.giver] += v
        received[t.receiver] += v
        utility += instance.weight(t.giver, t.receiver, t.item) * t.count
    return NetValueReport(given, received, utility)


def make_instance(
    values: Mapping[str, object],
    agents: Mapping[str, tuple[Iterable[str] | Mapping[str, int], Iterable[str] | Mapping[str, int]]],
    weights: TransferWeight | str = ITEM_VALUE,
    fairness: Iterable[tuple[Iterable[str], object]] = (),
) -> BarterInstance:
    """Compact constructor: ``agents`` maps id to ``(have, wish)``."""
    if isinstance(weights, str):
        weights = TransferWeight(weights)
    inst = BarterInstance(
        items=tuple(ItemSpec(j, v) for j, v in values.items()),
        agents=tuple(AgentSpec(i, h, w) for i, (h, w) in agents.items()),
        weights=weights,
        fairness=tuple(FairnessGroup(frozenset(g), f) for g, f in fairness),
    )
    return validate_instance(inst)
