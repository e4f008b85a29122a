"""Scenario files: a YAML declaration of network, adversary, strategy and run
parameters, validated field by field with a path into the structure for every
problem found."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

import yaml

from .adversary import (
    Adversary,
    AdversaryError,
    InjectionEvent,
    as_rate,
    burst_adversary,
    saturating_adversary,
    scripted_adversary,
)
from .network import Network, NetworkError, PacketPath, build_network, validate_path
from .strategies import DISCIPLINES

ADVERSARY_KINDS = ("scripted", "burst", "saturating")
STRATEGY_KINDS = ("plain", "interval")


class ScenarioError(ValueError):
    """All validation problems found in a scenario, each with its field path."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class Scenario:
    name: str
    network: Network
    adversary_kind: str
    r: Optional[Fraction]
    b: int
    sat_path: Optional[PacketPath]
    burst_paths: tuple[PacketPath, ...]
    events: tuple[InjectionEvent, ...]
    strategy_kind: str
    discipline: str
    improvement: bool
    max_steps: int


def load_scenario(path: str) -> Scenario:
    """Read and validate a scenario file. OSError and YAML errors propagate;
    structural problems raise ScenarioError listing every offending field."""
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    default_name = os.path.splitext(os.path.basename(path))[0]
    return parse_scenario(data, default_name)


def parse_scenario(data: Any, default_name: str = "scenario") -> Scenario:
    problems: list[str] = []

    def fail(where: str, msg: str) -> None:
        problems.append(f"{where}: {msg}")

    if not isinstance(data, dict):
        raise ScenarioError(["top level: expected a mapping"])

    known = {"name", "network", "adversary", "strategy", "run"}
    for key in data:
        if key not in known:
            fail(str(key), "unknown section")

    # -- name
    name = data.get("name", default_name)
    if not isinstance(name, str) or not name:
        fail("name", "must be a non-empty string")
        name = default_name
    elif os.sep in name or "/" in name:
        fail("name", "must not contain path separators")
        name = default_name

    # -- network
    network: Optional[Network] = None
    net_data = data.get("network")
    if not isinstance(net_data, dict):
        fail("network", "required mapping with 'nodes' and 'edges'")
    else:
        nodes = net_data.get("nodes")
        edges = net_data.get("edges")
        ok = True
        if not isinstance(nodes, list) or not nodes:
            fail("network.nodes", "must be a non-empty list")
            ok = False
        if not isinstance(edges, list):
            fail("network.edges", "must be a list of [source, target, id] triples")
            ok = False
        else:
            for i, e in enumerate(edges):
                if not (isinstance(e, list) and len(e) == 3):
                    fail(f"network.edges[{i}]", "must be a [source, target, id] triple")
                    ok = False
        if ok:
            try:
                network = build_network(nodes, [tuple(e) for e in edges])
            except NetworkError as exc:
                fail("network", str(exc))

    def read_path(raw: Any, where: str) -> Optional[PacketPath]:
        if not isinstance(raw, list) or not raw:
            fail(where, "must be a non-empty list of edge ids")
            return None
        p = PacketPath(tuple(raw))
        if network is not None and not validate_path(network, p):
            fail(where, f"not a contiguous path of declared edges: {raw}")
            return None
        return p

    # -- adversary
    adv_kind = ""
    r: Optional[Fraction] = None
    b = 1
    sat_path: Optional[PacketPath] = None
    burst_paths: list[PacketPath] = []
    events: list[InjectionEvent] = []
    adv = data.get("adversary")
    if not isinstance(adv, dict):
        fail("adversary", "required mapping with a 'kind'")
    else:
        adv_kind = adv.get("kind")
        if adv_kind not in ADVERSARY_KINDS:
            fail("adversary.kind", f"must be one of {', '.join(ADVERSARY_KINDS)}")
            adv_kind = ""
        allowed = {"kind", "r", "b", "path", "paths", "events"}
        for key in adv:
            if key not in allowed:
                fail(f"adversary.{key}", "unknown field")

        if "r" in adv:
            try:
                r = as_rate(adv["r"])
            except AdversaryError as exc:
                fail("adversary.r", str(exc))
        elif adv_kind in ("scripted", "saturating"):
            fail("adversary.r", f"required for the {adv_kind} adversary")

        raw_b = adv.get("b")
        if not isinstance(raw_b, int) or isinstance(raw_b, bool) or raw_b < 1:
            fail("adversary.b", f"must be an integer >= 1, got {raw_b!r}")
        else:
            b = raw_b

        if adv_kind == "saturating":
            sat_path = read_path(adv.get("path"), "adversary.path")
            if "paths" in adv or "events" in adv:
                fail("adversary", "saturating takes 'path', not 'paths'/'events'")
        elif adv_kind == "burst":
            raw_paths = adv.get("paths")
            if not isinstance(raw_paths, list) or not raw_paths:
                fail("adversary.paths", "must be a non-empty list of paths")
            else:
                for i, raw in enumerate(raw_paths):
                    p = read_path(raw, f"adversary.paths[{i}]")
                    if p is not None:
                        burst_paths.append(p)
            if "path" in adv or "events" in adv:
                fail("adversary", "burst takes 'paths', not 'path'/'events'")
        elif adv_kind == "scripted":
            raw_events = adv.get("events")
            if not isinstance(raw_events, list) or not raw_events:
                fail("adversary.events", "must be a non-empty list of {step, path}")
            else:
                last_step = 0
                for i, raw in enumerate(raw_events):
                    where = f"adversary.events[{i}]"
                    if not isinstance(raw, dict):
                        fail(where, "must be a mapping with 'step' and 'path'")
                        continue
                    step_no = raw.get("step")
                    if not isinstance(step_no, int) or isinstance(step_no, bool) or step_no < 1:
                        fail(f"{where}.step", f"must be an integer >= 1, got {step_no!r}")
                        continue
                    if step_no < last_step:
                        fail(f"{where}.step", "events must be sorted by step")
                    last_step = max(last_step, step_no)
                    p = read_path(raw.get("path"), f"{where}.path")
                    if p is not None:
                        events.append(InjectionEvent(step_no, p))
            if "path" in adv or "paths" in adv:
                fail("adversary", "scripted takes 'events', not 'path'/'paths'")

    # -- strategy
    strat_kind = "plain"
    discipline = "FIFO"
    improvement = False
    strat = data.get("strategy")
    if not isinstance(strat, dict):
        fail("strategy", "required mapping with 'kind' and 'discipline'")
    else:
        strat_kind = strat.get("kind")
        if strat_kind not in STRATEGY_KINDS:
            fail("strategy.kind", f"must be one of {', '.join(STRATEGY_KINDS)}")
            strat_kind = "plain"
        for key in strat:
            if key not in {"kind", "discipline", "improvement"}:
                fail(f"strategy.{key}", "unknown field")
        raw_disc = strat.get("discipline")
        if not isinstance(raw_disc, str) or raw_disc.upper() not in DISCIPLINES:
            fail(
                "strategy.discipline",
                f"must be one of {', '.join(sorted(DISCIPLINES))}, got {raw_disc!r}",
            )
        else:
            discipline = raw_disc.upper()
        raw_improve = strat.get("improvement", False)
        if not isinstance(raw_improve, bool):
            fail("strategy.improvement", f"must be a boolean, got {raw_improve!r}")
        elif raw_improve and strat_kind == "plain":
            fail("strategy.improvement", "only valid for the interval strategy")
        else:
            improvement = raw_improve

    # -- run
    max_steps = 1
    run_data = data.get("run")
    if not isinstance(run_data, dict):
        fail("run", "required mapping with 'max_steps'")
    else:
        for key in run_data:
            if key not in {"max_steps"}:
                fail(f"run.{key}", "unknown field")
        raw_steps = run_data.get("max_steps")
        if not isinstance(raw_steps, int) or isinstance(raw_steps, bool) or raw_steps < 1:
            fail("run.max_steps", f"must be an integer >= 1, got {raw_steps!r}")
        else:
            max_steps = raw_steps

    if problems:
        raise ScenarioError(problems)
    assert network is not None
    return Scenario(
        name=name,
        network=network,
        adversary_kind=adv_kind,
        r=r,
        b=b,
        sat_path=sat_path,
        burst_paths=tuple(burst_paths),
        events=tuple(events),
        strategy_kind=strat_kind,
        discipline=discipline,
        improvement=improvement,
        max_steps=max_steps,
    )


def make_adversary(scenario: Scenario) -> Adversary:
    """Fresh adversary instance for one run (adversaries are stateful).
    Raises AdversaryError for inadmissible scripted events."""
    if scenario.adversary_kind == "scripted":
        return scripted_adversary(
            list(scenario.events), scenario.r, scenario.b, scenario.network
        )
    if scenario.adversary_kind == "burst":
        return burst_adversary(scenario.network, list(scenario.burst_paths), scenario.b)
    if scenario.adversary_kind == "saturating":
        return saturating_adversary(
            scenario.network, scenario.sat_path, scenario.r, scenario.b
        )
    raise ScenarioError([f"adversary.kind: unknown kind {scenario.adversary_kind!r}"])
