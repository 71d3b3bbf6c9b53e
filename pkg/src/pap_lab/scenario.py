"""Scenario runner: parse a JSON scenario file, execute honest sessions and
attack campaigns deterministically, write per-step JSONL transcripts and a
summary report.

The scenario seed fully determines every random draw of a run: identical
(scenario, seed) pairs produce byte-identical transcript files and report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import attacks
from .channel import Channel, SeqCounter, TranscriptEvent, transcript_lines
from .crypto import RngState, next_nonce, seed_rng
from .errors import (
    InvalidCapabilityCombo,
    ParseError,
    PapLabError,
    SchemaError,
    UnknownEntityRef,
)
from .model import AdversaryCapabilities, KeyDatabase, ReaderKind, ReaderState, TagState
from .protocol import AUTHENTICATED, SubProtocol, run_session

ATTACK_NAMES = (
    "forward_trace",
    "backward_trace",
    "impersonate",
    "constant_id_link",
    "constellation_link",
    "privacy_game",
)

MESSAGE_TYPES = ("query", "tag_reply", "reader_auth", "tag_auth")
DIRECTIONS = ("forward", "backward")

EVENT_FIELDS = ("seq", "direction", "from", "to", "msg_type",
                "fields_hex", "intercepted", "dropped")


@dataclass
class TagDecl:
    label: str
    tag_id: int
    name: int
    key: Any          # int or the string "random"
    privacy_bit: int = 0


@dataclass
class ReaderDecl:
    label: str
    kind: ReaderKind


@dataclass
class SessionStep:
    subprotocol: SubProtocol
    tag: str
    reader: str


@dataclass
class AttackStep:
    name: str
    params: dict


@dataclass
class Scenario:
    seed: int
    tags: list[TagDecl]
    readers: list[ReaderDecl]
    adversary: AdversaryCapabilities
    program: list[SessionStep | AttackStep]
    trials: int = 1000
    halt_on_error: bool = False


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise ParseError(message)


def _as_u64(value, what: str) -> int:
    _expect(isinstance(value, int) and not isinstance(value, bool), f"{what} must be an integer")
    _expect(0 <= value < 1 << 64, f"{what} out of 64-bit range")
    return value


def parse_scenario(text: str) -> Scenario:
    """Parse and fully validate a scenario document.

    Raises ParseError on malformed structure, UnknownEntityRef when a
    program step references an undeclared tag or reader, and
    InvalidCapabilityCombo for inconsistent adversary flags.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    _expect(isinstance(doc, dict), "scenario must be a JSON object")

    seed = _as_u64(doc.get("seed", 0), "seed")

    tags: list[TagDecl] = []
    tag_labels: set[str] = set()
    _expect(isinstance(doc.get("tags"), list) and doc["tags"], "scenario needs a non-empty 'tags' list")
    for i, entry in enumerate(doc["tags"]):
        _expect(isinstance(entry, dict), f"tags[{i}] must be an object")
        label = entry.get("label")
        _expect(isinstance(label, str) and label, f"tags[{i}] needs a 'label'")
        _expect(label not in tag_labels, f"duplicate tag label {label!r}")
        tag_labels.add(label)
        tag_id = entry.get("id")
        _expect(isinstance(tag_id, int) and 0 <= tag_id < 1 << 96,
                f"tag {label!r}: 'id' must be a 96-bit integer")
        name = entry.get("name")
        _expect(isinstance(name, int) and 0 <= name < 1 << 32,
                f"tag {label!r}: 'name' must be a 32-bit integer")
        key = entry.get("key", "random")
        if key != "random":
            key = _as_u64(key, f"tag {label!r} key")
        privacy_bit = entry.get("privacy_bit", 0)
        _expect(privacy_bit in (0, 1), f"tag {label!r}: 'privacy_bit' must be 0 or 1")
        tags.append(TagDecl(label, tag_id, name, key, privacy_bit))

    readers: list[ReaderDecl] = []
    reader_labels: set[str] = set()
    _expect(isinstance(doc.get("readers"), list) and doc["readers"],
            "scenario needs a non-empty 'readers' list")
    for i, entry in enumerate(doc["readers"]):
        _expect(isinstance(entry, dict), f"readers[{i}] must be an object")
        label = entry.get("label")
        _expect(isinstance(label, str) and label, f"readers[{i}] needs a 'label'")
        _expect(label not in reader_labels, f"duplicate reader label {label!r}")
        reader_labels.add(label)
        kind_name = entry.get("kind")
        try:
            kind = ReaderKind(kind_name)
        except ValueError:
            raise ParseError(f"reader {label!r}: unknown kind {kind_name!r}") from None
        readers.append(ReaderDecl(label, kind))

    adversary_doc = doc.get("adversary")
    if adversary_doc is None:
        adversary = AdversaryCapabilities.full()  # the common channel assumption
    else:
        _expect(isinstance(adversary_doc, dict), "'adversary' must be an object")
        unknown = set(adversary_doc) - {"eavesdrop_forward", "eavesdrop_backward",
                                        "intercept", "act_as_reader"}
        _expect(not unknown, f"unknown adversary flags: {sorted(unknown)}")
        for flag, value in adversary_doc.items():
            _expect(isinstance(value, bool), f"adversary flag {flag!r} must be a boolean")
        adversary = AdversaryCapabilities(**adversary_doc)  # may raise InvalidCapabilityCombo

    trials = doc.get("trials", 1000)
    _expect(isinstance(trials, int) and trials > 0, "'trials' must be a positive integer")
    halt_on_error = doc.get("halt_on_error", False)
    _expect(isinstance(halt_on_error, bool), "'halt_on_error' must be a boolean")

    def check_tag_ref(label, where):
        if label not in tag_labels:
            raise UnknownEntityRef(f"{where} references undeclared tag {label!r}")
        return label

    def check_reader_ref(label, where, optional=False):
        if label is None and optional:
            return None
        if label not in reader_labels:
            raise UnknownEntityRef(f"{where} references undeclared reader {label!r}")
        return label

    program: list[SessionStep | AttackStep] = []
    _expect(isinstance(doc.get("program"), list), "scenario needs a 'program' list")
    for i, entry in enumerate(doc["program"]):
        where = f"program[{i}]"
        _expect(isinstance(entry, dict) and len(entry) == 1 and
                next(iter(entry)) in ("session", "attack"),
                f"{where} must be exactly one of {{'session': ...}} or {{'attack': ...}}")
        if "session" in entry:
            body = entry["session"]
            _expect(isinstance(body, dict), f"{where}: session must be an object")
            try:
                sp = SubProtocol(body.get("subprotocol"))
            except ValueError:
                raise ParseError(f"{where}: unknown subprotocol "
                                 f"{body.get('subprotocol')!r}") from None
            tag = check_tag_ref(body.get("tag"), where)
            reader = check_reader_ref(body.get("reader"), where)
            program.append(SessionStep(sp, tag, reader))
            continue

        body = entry["attack"]
        _expect(isinstance(body, dict), f"{where}: attack must be an object")
        name = body.get("name")
        _expect(name in ATTACK_NAMES, f"{where}: unknown attack {name!r}")
        params = {k: v for k, v in body.items() if k != "name"}
        if name in ("forward_trace", "backward_trace"):
            targets = params.get("tags", [params.get("tag")])
            _expect(isinstance(targets, list) and targets and all(t for t in targets),
                    f"{where}: needs 'tag' or a non-empty 'tags' list")
            for t in targets:
                check_tag_ref(t, where)
            params["tags"] = targets
            params.pop("tag", None)
            check_reader_ref(params.get("checkout_reader"), where, optional=True)
            check_reader_ref(params.get("return_reader"), where, optional=True)
            runs = params.get("runs", 2)
            _expect(isinstance(runs, int) and runs >= 1, f"{where}: 'runs' must be >= 1")
            c = params.get("c", "random")
            if c != "random":
                _as_u64(c, f"{where}: 'c'")
        elif name == "impersonate":
            check_tag_ref(params.get("target"), where)
            check_reader_ref(params.get("reader_1"), where)
            check_reader_ref(params.get("reader_2"), where)
        elif name == "constant_id_link":
            check_tag_ref(params.get("tag_a"), where)
            check_tag_ref(params.get("tag_b", params.get("tag_a")), where)
            check_reader_ref(params.get("reader"), where, optional=True)
        elif name == "constellation_link":
            for side in ("holder_a", "holder_b"):
                holder = params.get(side)
                _expect(isinstance(holder, list) and holder,
                        f"{where}: '{side}' must be a non-empty list of tag labels")
                for t in holder:
                    check_tag_ref(t, where)
            check_reader_ref(params.get("reader"), where, optional=True)
        elif name == "privacy_game":
            check_tag_ref(params.get("tag_a"), where)
            check_tag_ref(params.get("tag_b"), where)
            try:
                attacks.GameStrategy(params.get("strategy"))
            except ValueError:
                raise ParseError(f"{where}: unknown strategy "
                                 f"{params.get('strategy')!r}") from None
            check_reader_ref(params.get("checkout_reader"), where, optional=True)
            check_reader_ref(params.get("return_reader"), where, optional=True)
            game_trials = params.get("trials", trials)
            _expect(isinstance(game_trials, int) and game_trials > 0,
                    f"{where}: 'trials' must be a positive integer")
        program.append(AttackStep(name, params))

    return Scenario(seed, tags, readers, adversary, program, trials, halt_on_error)


def load_scenario(path) -> Scenario:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


@dataclass
class _World:
    tags: dict[str, TagState]
    readers: dict[str, ReaderState]
    db: KeyDatabase
    capabilities: AdversaryCapabilities
    master: RngState

    def draw(self) -> int:
        value, self.master = next_nonce(self.master)
        return value

    def first_reader(self, kind: ReaderKind | None = None) -> ReaderState | None:
        for reader in self.readers.values():
            if kind is None or reader.kind is kind:
                return reader
        return None


def _build_world(scenario: Scenario, seed: int) -> _World:
    master = seed_rng(seed)
    world = _World({}, {}, KeyDatabase(), scenario.adversary, master)
    name_keys: dict[int, int] = {}
    for decl in scenario.tags:
        if decl.key == "random":
            if decl.name not in name_keys:
                name_keys[decl.name] = world.draw()
            key = name_keys[decl.name]
        else:
            key = decl.key
            name_keys.setdefault(decl.name, key)
        tag_rng = seed_rng(world.draw())
        world.tags[decl.label] = TagState(decl.tag_id, decl.name, key, tag_rng,
                                          decl.privacy_bit, label=decl.label)
    for tag in world.tags.values():
        world.db.register(tag)
    for decl in scenario.readers:
        db = None if decl.kind is ReaderKind.INVENTORY else world.db
        world.readers[decl.label] = ReaderState(decl.kind, db, seed_rng(world.draw()),
                                                label=decl.label)
    return world


def _session_runner_from_params(world: _World, tag: TagState, params: dict):
    checkout_label = params.get("checkout_reader")
    return_label = params.get("return_reader")
    checkout = (world.readers[checkout_label] if checkout_label
                else world.first_reader(ReaderKind.CHECKOUT))
    ret = (world.readers[return_label] if return_label
           else world.first_reader(ReaderKind.RETURN))
    return attacks.make_session_runner(tag, checkout, ret), checkout, ret


def _run_attack_step(world: _World, step: AttackStep, seq: SeqCounter,
                     default_trials: int):
    """Execute one attack step; returns (record, merged transcript events)."""
    caps = world.capabilities
    factory = lambda: Channel(caps, seq=seq)  # noqa: E731
    params = step.params

    if step.name in ("forward_trace", "backward_trace"):
        targets = [world.tags[label] for label in params["tags"]]
        runners = [_session_runner_from_params(world, tag, params)[0] for tag in targets]
        runner = runners[0] if len(runners) == 1 else attacks.rotating_runner(runners)
        c = params.get("c", "random")
        constant = world.draw() if c == "random" else c
        fn = attacks.forward_trace if step.name == "forward_trace" else attacks.backward_trace
        report = fn(runner, constant, caps, runs=params.get("runs", 2),
                    channel_factory=factory)
        return report, _merge(report.transcripts)

    if step.name == "impersonate":
        target = world.tags[params["target"]]
        report = attacks.impersonate(
            world.readers[params["reader_1"]], world.readers[params["reader_2"]],
            target.wire_ident(), caps, rng=seed_rng(world.draw()),
            channel_factory=factory)
        return report, _merge(report.transcripts)

    if step.name == "constant_id_link":
        tag_a = world.tags[params["tag_a"]]
        tag_b = world.tags[params.get("tag_b", params["tag_a"])]
        reader_label = params.get("reader")
        reader = world.readers[reader_label] if reader_label else world.first_reader()
        report = attacks.constant_id_campaign(
            attacks.make_readonly_runner(tag_a, reader),
            attacks.make_readonly_runner(tag_b, reader),
            caps, channel_factory=factory)
        return report, _merge(report.transcripts)

    if step.name == "constellation_link":
        holder_a = [world.tags[label] for label in params["holder_a"]]
        holder_b = [world.tags[label] for label in params["holder_b"]]
        reader_label = params.get("reader")
        reader = world.readers[reader_label] if reader_label else world.first_reader()
        report = attacks.constellation_campaign(holder_a, holder_b, reader, caps,
                                                channel_factory=factory)
        return report, _merge(report.transcripts)

    # privacy_game: statistical step, no transcript is kept
    tag_a, tag_b = world.tags[params["tag_a"]], world.tags[params["tag_b"]]
    strategy = attacks.GameStrategy(params["strategy"])
    _, checkout, ret = _session_runner_from_params(world, tag_a, params)
    c = params.get("c")
    constant = None if c in (None, "random") else c
    game_trials = params.get("trials", default_trials)
    advantage = attacks.privacy_game(
        tag_a, tag_b, strategy, game_trials, seed_rng(world.draw()), caps,
        checkout_reader=checkout, return_reader=ret, constant=constant)
    record = {"strategy": strategy.value, "trials": game_trials, "advantage": advantage}
    return record, []


def _merge(transcripts: list[list[TranscriptEvent]]) -> list[TranscriptEvent]:
    events = [event for part in transcripts for event in part]
    events.sort(key=lambda e: e.seq)
    return events


def run_scenario(scenario: Scenario, out_dir, seed_override: int | None = None,
                 halt_on_error: bool | None = None) -> dict:
    """Execute the scenario program in order and write all outputs to out_dir.

    Entity state persists across steps (a checkout flips the tag's bit for
    every later step). Returns the report dict, also written to report.json.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seed = scenario.seed if seed_override is None else seed_override
    halt = scenario.halt_on_error if halt_on_error is None else halt_on_error
    world = _build_world(scenario, seed)

    steps_out: list[dict] = []
    transcript_names: list[str] = []
    counters = {
        "steps": 0, "sessions_run": 0, "attacks_run": 0, "attacks_succeeded": 0,
        "sessions_mutually_accepted": 0, "steps_errored": 0,
        "messages_total": 0, "intercepted_total": 0, "dropped_total": 0,
    }
    halted = False

    for index, step in enumerate(scenario.program):
        counters["steps"] += 1
        seq = SeqCounter()
        label = step.subprotocol.value if isinstance(step, SessionStep) else step.name
        entry: dict = {"index": index, "label": label}
        events: list[TranscriptEvent] = []
        error: str | None = None

        if isinstance(step, SessionStep):
            entry["kind"] = "session"
            entry["tag"], entry["reader"] = step.tag, step.reader
            counters["sessions_run"] += 1
            channel = Channel(world.capabilities, seq=seq)
            verdict, events = run_session(step.subprotocol, world.tags[step.tag],
                                          world.readers[step.reader], channel)
            entry["verdict"] = verdict.to_json()
            if verdict.aborted is not None:
                error = f"session aborted: {verdict.aborted}"
            elif step.subprotocol in AUTHENTICATED and verdict.mutual:
                counters["sessions_mutually_accepted"] += 1
        else:
            entry["kind"] = "attack"
            counters["attacks_run"] += 1
            try:
                outcome, events = _run_attack_step(world, step, seq, scenario.trials)
            except (PapLabError, ValueError) as exc:
                error = f"{type(exc).__name__}: {exc}"
                outcome = None
            if isinstance(outcome, attacks.AttackReport):
                name = f"step-{index}-{label}.jsonl"
                outcome.session_paths = [name]
                entry["report"] = outcome.to_json()
                if outcome.success:
                    counters["attacks_succeeded"] += 1
            elif outcome is not None:
                entry["game"] = outcome

        filename = f"step-{index}-{label}.jsonl"
        lines = transcript_lines(events)
        (out / filename).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        transcript_names.append(filename)
        entry["transcript"] = filename
        entry["error"] = error
        counters["messages_total"] += len(events)
        counters["intercepted_total"] += sum(1 for e in events if e.intercepted)
        counters["dropped_total"] += sum(1 for e in events if e.dropped)
        if error is not None:
            counters["steps_errored"] += 1
        steps_out.append(entry)
        if error is not None and halt:
            halted = True
            break

    auth_sessions = sum(1 for s in scenario.program[:len(steps_out)]
                        if isinstance(s, SessionStep) and s.subprotocol in AUTHENTICATED)
    counters["mutual_acceptance_rate"] = (
        counters["sessions_mutually_accepted"] / auth_sessions if auth_sessions else None)

    report = {
        "seed": seed,
        "halted": halted,
        "steps": steps_out,
        "counters": counters,
        "transcripts": transcript_names,
    }
    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    return report


def summarize_transcripts(paths) -> dict:
    """Aggregate statistics over transcript files; pure function of inputs.

    Counts messages per type and direction, interceptions, drops, and the
    wire-visible acceptance rate (tag answers per reader challenge).
    """
    messages = {t: {d: 0 for d in DIRECTIONS} for t in MESSAGE_TYPES}
    events = 0
    intercepted = 0
    dropped = 0
    delivered_auth = {"reader_auth": 0, "tag_auth": 0}
    files = 0

    for path in paths:
        files += 1
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    event = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise SchemaError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from None
                if not isinstance(event, dict) or any(k not in event for k in EVENT_FIELDS):
                    raise SchemaError(f"{path}:{lineno}: missing transcript fields")
                if event["msg_type"] not in MESSAGE_TYPES:
                    raise SchemaError(f"{path}:{lineno}: unknown msg_type {event['msg_type']!r}")
                if event["direction"] not in DIRECTIONS:
                    raise SchemaError(f"{path}:{lineno}: unknown direction {event['direction']!r}")
                events += 1
                messages[event["msg_type"]][event["direction"]] += 1
                if event["intercepted"]:
                    intercepted += 1
                if event["dropped"]:
                    dropped += 1
                elif event["msg_type"] in delivered_auth:
                    delivered_auth[event["msg_type"]] += 1

    rate = (delivered_auth["tag_auth"] / delivered_auth["reader_auth"]
            if delivered_auth["reader_auth"] else None)
    return {
        "files": files,
        "events": events,
        "messages": messages,
        "intercepted": intercepted,
        "dropped": dropped,
        "sessions_observed": sum(messages["query"].values()),
        "tag_acceptance_rate": rate,
    }


def summarize_directory(directory) -> dict:
    paths = sorted(p for p in Path(directory).glob("*.jsonl"))
    return summarize_transcripts(paths)
