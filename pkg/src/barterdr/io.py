"""JSON documents for instances, allocations and oracle results.

All values, weights and floors are written as lowest-terms ``"p/q"`` strings;
decimal strings and JSON numbers are accepted on input and parsed exactly.
Output is byte-stable: keys sorted, transfers sorted, fixed indentation.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .model import (
    ITEM_VALUE,
    UNIT,
    AgentSpec,
    Allocation,
    BarterInstance,
    FairnessGroup,
    ItemSpec,
    NetValueReport,
    TransferWeight,
    ValidationError,
    format_fraction,
    to_fraction,
    validate_instance,
)


class ParseError(ValueError):
    """A document is malformed; the message names the offending field."""


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _num(raw, where: str) -> Fraction:
    try:
        return to_fraction(raw)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: {exc}") from None


def _obj(raw, where: str) -> dict:
    if not isinstance(raw, dict):
        raise ParseError(f"{where}: expected an object")
    return raw


def _list(raw, where: str) -> list:
    if not isinstance(raw, list):
        raise ParseError(f"{where}: expected a list")
    return raw


def _str(raw, where: str) -> str:
    if not isinstance(raw, str) or not raw:
        raise ParseError(f"{where}: expected a non-empty string")
    return raw


def _caps(raw, where: str) -> dict[str, int]:
    if isinstance(raw, list):
        raw = {_str(j, f"{where}[{k}]"): 1 for k, j in enumerate(raw)}
    raw = _obj(raw, where)
    out = {}
    for item, cap in raw.items():
        if isinstance(cap, bool) or not isinstance(cap, int) or cap < 1:
            raise ParseError(f"{where}.{item}: capacity must be a positive integer")
        out[item] = cap
    return out


def _weights(raw, where: str = "weights") -> TransferWeight:
    if raw is None:
        return TransferWeight(ITEM_VALUE)
    if isinstance(raw, str):
        if raw not in (ITEM_VALUE, UNIT):
            raise ParseError(f"{where}: unknown rule {raw!r}")
        return TransferWeight(raw)
    rule, entries = ITEM_VALUE, raw
    if isinstance(raw, dict):
        rule = raw.get("rule", ITEM_VALUE)
        if rule not in (ITEM_VALUE, UNIT):
            raise ParseError(f"{where}.rule: unknown rule {rule!r}")
        entries = raw.get("entries", [])
    explicit = {}
    for k, e in enumerate(_list(entries, where)):
        w = f"{where}[{k}]"
        e = _obj(e, w)
        try:
            key = (str(e["giver"]), str(e["receiver"]), str(e["item"]))
            explicit[key] = _num(e["w"], f"{w}.w")
        except KeyError as exc:
            raise ParseError(f"{w}: missing field {exc.args[0]!r}") from None
    return TransferWeight(rule, explicit)


def instance_from_dict(doc: dict) -> BarterInstance:
    doc = _obj(doc, "instance")
    items = []
    for k, it in enumerate(_list(doc.get("items"), "items")):
        it = _obj(it, f"items[{k}]")
        if "id" not in it or "value" not in it:
            raise ParseError(f"items[{k}]: needs 'id' and 'value'")
        items.append(ItemSpec(_str(it["id"], f"items[{k}].id"), _num(it["value"], f"items[{k}].value")))
    agents = []
    for k, a in enumerate(_list(doc.get("agents"), "agents")):
        a = _obj(a, f"agents[{k}]")
        aid = _str(a.get("id"), f"agents[{k}].id")
        agents.append(
            AgentSpec(
                aid,
                _caps(a.get("have", {}), f"agents[{k}].have"),
                _caps(a.get("wish", {}), f"agents[{k}].wish"),
            )
        )
    fairness = []
    for k, f in enumerate(_list(doc.get("fairness", []), "fairness")):
        f = _obj(f, f"fairness[{k}]")
        group = [_str(g, f"fairness[{k}].group") for g in _list(f.get("group"), f"fairness[{k}].group")]
        if "floor" not in f:
            raise ParseError(f"fairness[{k}]: missing 'floor'")
        fairness.append(FairnessGroup(frozenset(group), _num(f["floor"], f"fairness[{k}].floor")))
    try:
        inst = BarterInstance(tuple(items), tuple(agents), _weights(doc.get("weights")), tuple(fairness))
        return validate_instance(inst)
    except ValidationError as exc:
        raise ParseError(str(exc)) from None


def instance_to_dict(inst: BarterInstance) -> dict:
    w = inst.weights
    if not w.explicit:
        weights: Any = w.rule
    else:
        entries = [
            {"giver": g, "receiver": r, "item": j, "w": format_fraction(v)}
            for (g, r, j), v in sorted(w.explicit.items())
        ]
        weights = entries if w.rule == ITEM_VALUE else {"rule": w.rule, "entries": entries}
    return {
        "items": [{"id": it.item_id, "value": format_fraction(it.value)} for it in inst.items],
        "agents": [
            {"id": a.agent_id, "have": dict(a.have), "wish": dict(a.wish)} for a in inst.agents
        ],
        "weights": weights,
        "fairness": [
            {"group": sorted(f.agents), "floor": format_fraction(f.floor)} for f in inst.fairness
        ],
    }


def parse_instance(text: str) -> BarterInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return instance_from_dict(doc)


def dump_instance(inst: BarterInstance) -> str:
    return dumps(instance_to_dict(inst))


def transfers_to_list(alloc: Allocation | None) -> list[dict]:
    if alloc is None:
        return []
    return [
        {"giver": t.giver, "receiver": t.receiver, "item": t.item, "count": t.count}
        for t in sorted(alloc.transfers)
    ]


def allocation_document(alloc: Allocation, report: NetValueReport, seed, lp_objective: Fraction) -> dict:
    return {
        "transfers": transfers_to_list(alloc),
        "report": {
            "per_agent": {
                a: {
                    "given": format_fraction(report.given[a]),
                    "received": format_fraction(report.received[a]),
                    "D": format_fraction(report.net[a]),
                }
                for a in report.given
            },
            "utility": format_fraction(report.utility),
        },
        "seed": seed,
        "lp_objective": format_fraction(lp_objective),
    }


def oracle_document(result) -> dict:
    return {
        "best_utility": None if result.best_utility is None else format_fraction(result.best_utility),
        "best_allocation": None
        if result.best_allocation is None
        else transfers_to_list(result.best_allocation),
        "has_nonempty_balanced": result.has_nonempty_balanced,
        "enumerated_count": result.enumerated_count,
    }
