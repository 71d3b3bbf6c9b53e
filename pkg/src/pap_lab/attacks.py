"""Adversary strategies: session linkers, the two constant-nonce traces, the
relay impersonation, and a two-tag indistinguishability game.

Every attack works purely on wire-visible data. A key-read audit wraps each
adversary code block (interceptor transforms, message composition, linkage
verdicts): any access to tag key material inside such a block would show up
in AttackReport.adversary_key_reads, which is asserted to stay zero.
"""

from __future__ import annotations

from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Sequence

from .channel import (
    Channel,
    Direction,
    Interceptor,
    Pass,
    Replace,
    TranscriptEvent,
)
from .crypto import MASK64, RngState, next_nonce, seed_rng
from .errors import (
    CapabilityMissing,
    DegenerateGame,
    MalformedLog,
    NoDatabase,
    NoTagAuth,
    UnknownIdentifier,
)
from .model import AdversaryCapabilities, ReaderState, TagState, key_read_count
from .protocol import (
    SessionVerdict,
    SubProtocol,
    reader_auth_step,
    reader_verify,
    run_session,
)
from .wire import IdOrName, Query, ReaderAuth, TagAuth, TagName, TagReply

ATTACK_CONSTANT_ID_LINK = "ConstantIdLink"
ATTACK_CONSTELLATION_LINK = "ConstellationLink"
ATTACK_FORWARD_TRACE = "ForwardTrace"
ATTACK_BACKWARD_TRACE = "BackwardTrace"
ATTACK_IMPERSONATION = "Impersonation"

# one target session through a prepared channel
SessionRunner = Callable[[Channel], tuple[SessionVerdict, list[TranscriptEvent]]]

EavesdropLog = Sequence[tuple[Direction, object]]

_INTERCEPT_CAPS = AdversaryCapabilities(
    eavesdrop_forward=True, eavesdrop_backward=True, intercept=True
)


@dataclass
class AttackReport:
    attack: str
    success: bool
    linked: bool | None = None
    transcripts: list[list[TranscriptEvent]] = field(default_factory=list)
    adversary_key_reads: int = 0
    detail: str = ""
    session_paths: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "attack": self.attack,
            "success": self.success,
            "linked": self.linked,
            "adversary_key_reads": self.adversary_key_reads,
            "session_transcript_paths": list(self.session_paths),
        }


class KeyReadAudit:
    """Attributes secret-key reads to adversary code blocks."""

    def __init__(self):
        self.reads = 0

    @contextmanager
    def watch(self):
        before = key_read_count()
        try:
            yield
        finally:
            self.reads += key_read_count() - before

    def wrap(self, transform):
        def wrapped(msg, direction):
            with self.watch():
                return transform(msg, direction)
        return wrapped


def _assert_zero_reads(report: AttackReport) -> AttackReport:
    assert report.adversary_key_reads == 0, (
        f"{report.attack} adversary read key material "
        f"{report.adversary_key_reads} time(s)"
    )
    return report


def make_session_runner(tag: TagState, checkout_reader: ReaderState | None = None,
                        return_reader: ReaderState | None = None) -> SessionRunner:
    """Runner for one authenticated session against the tag.

    Picks checkout or return to match the tag's current privacy bit, so
    campaigns whose sessions flip the bit keep working run after run.
    """
    def run_one(channel: Channel):
        if tag.privacy_bit == 0:
            if checkout_reader is None:
                raise ValueError(f"tag {tag.label!r} needs a checkout reader")
            return run_session(SubProtocol.CHECKOUT, tag, checkout_reader, channel)
        if return_reader is None:
            raise ValueError(f"tag {tag.label!r} needs a return reader")
        return run_session(SubProtocol.RETURN, tag, return_reader, channel)
    return run_one


def make_readonly_runner(tag: TagState, reader: ReaderState) -> SessionRunner:
    """Runner for one read-only (in-store/out-store) session against the tag."""
    def run_one(channel: Channel):
        sp = SubProtocol.IN_STORE if tag.privacy_bit == 0 else SubProtocol.OUT_STORE
        return run_session(sp, tag, reader, channel)
    return run_one


def rotating_runner(runners: Sequence[SessionRunner]) -> SessionRunner:
    """Cycle through several runners; used for distinct-target campaigns."""
    state = {"calls": 0}

    def run_one(channel: Channel):
        runner = runners[state["calls"] % len(runners)]
        state["calls"] += 1
        return runner(channel)
    return run_one


def _require(capabilities: AdversaryCapabilities, *, eavesdrop: bool = False,
             intercept: bool = False, act_as_reader: bool = False) -> None:
    if eavesdrop and not (capabilities.eavesdrop_forward and capabilities.eavesdrop_backward):
        raise CapabilityMissing("attack needs eavesdropping on both channels")
    if intercept and not capabilities.intercept:
        raise CapabilityMissing("attack needs the intercept capability")
    if act_as_reader and not capabilities.act_as_reader:
        raise CapabilityMissing("attack needs the act-as-reader capability")


# --- session linkers (verdicts over eavesdropped data) ---

def link_by_constant_id(log_a: EavesdropLog, log_b: EavesdropLog) -> bool:
    """Link two read-only session logs by their tag reply ident values."""
    def reply_ident(log) -> IdOrName:
        for _, msg in log:
            if isinstance(msg, TagReply):
                return msg.ident
        raise MalformedLog("session log contains no tag reply")
    return reply_ident(log_a) == reply_ident(log_b)


def link_by_constellation(names_a: Iterable[int], names_b: Iterable[int]) -> bool:
    """Link two holders by the multisets of generic names they carry."""
    count_a, count_b = Counter(names_a), Counter(names_b)
    if not count_a or not count_b:
        raise MalformedLog("constellation observation is empty")
    return count_a == count_b


# --- constant-nonce traces ---

def forward_trace(runner: SessionRunner, constant: int,
                  capabilities: AdversaryCapabilities, runs: int = 2,
                  channel_factory: Callable[[], Channel] | None = None) -> AttackReport:
    """Rewrite the tag's nonce to a constant and link runs by the reader token.

    The reader then computes its token over the constant, so the token is
    identical whenever the same key is behind the ident. The tag rejects the
    challenge (it expects a token over its real nonce); tracking only needs
    the reader's answer, so the linkage verdict is unaffected.
    """
    _require(capabilities, eavesdrop=True, intercept=True)
    audit = KeyReadAudit()
    factory = channel_factory or (lambda: Channel(capabilities))
    constant &= MASK64

    def rewrite(msg, direction):
        if direction is Direction.BACKWARD and isinstance(msg, TagReply):
            return Replace(TagReply(msg.ident, constant))
        return Pass()

    transcripts: list[list[TranscriptEvent]] = []
    tokens: list[int | None] = []
    for _ in range(runs):
        channel = factory()
        channel.attach(Interceptor(audit.wrap(rewrite), requires=_INTERCEPT_CAPS,
                                   label="rewrite_tag_nonce"))
        _, events = runner(channel)
        transcripts.append(events)
        with audit.watch():
            token = next((m.reader_token for _, m in channel.eavesdrop_log(capabilities)
                          if isinstance(m, ReaderAuth)), None)
        tokens.append(token)

    captured = [t for t in tokens if t is not None]
    success = len(captured) == runs
    linked: bool | None = None
    detail = ""
    if len(captured) >= 2:
        with audit.watch():
            linked = all(t == captured[0] for t in captured[1:])
    else:
        detail = "insufficient runs with a captured reader token"

    return _assert_zero_reads(AttackReport(
        ATTACK_FORWARD_TRACE, success, linked, transcripts, audit.reads, detail))


def backward_trace(runner: SessionRunner, constant: int,
                   capabilities: AdversaryCapabilities, runs: int = 2,
                   channel_factory: Callable[[], Channel] | None = None) -> AttackReport:
    """Rewrite the reader's nonce to a constant and link runs by the tag token.

    The tag accepts the untouched reader token (its privacy bit flips) and
    answers with a token over the constant; the reader rejects that answer.
    Both facts are recorded in the transcripts.
    """
    _require(capabilities, eavesdrop=True, intercept=True)
    audit = KeyReadAudit()
    factory = channel_factory or (lambda: Channel(capabilities))
    constant &= MASK64

    def rewrite(msg, direction):
        if direction is Direction.FORWARD and isinstance(msg, ReaderAuth):
            return Replace(ReaderAuth(msg.reader_token, constant))
        return Pass()

    transcripts: list[list[TranscriptEvent]] = []
    tokens: list[int | None] = []
    for _ in range(runs):
        channel = factory()
        channel.attach(Interceptor(audit.wrap(rewrite), requires=_INTERCEPT_CAPS,
                                   label="rewrite_reader_nonce"))
        _, events = runner(channel)
        transcripts.append(events)
        with audit.watch():
            log = channel.eavesdrop_log(capabilities)
            token = next((m.tag_token for _, m in log if isinstance(m, TagAuth)), None)
            challenged = any(isinstance(m, ReaderAuth) for _, m in log)
        if token is None and challenged:
            raise NoTagAuth("tag rejected the reader token; third-party tampering?")
        tokens.append(token)

    captured = [t for t in tokens if t is not None]
    success = len(captured) == runs
    linked: bool | None = None
    detail = ""
    if len(captured) >= 2:
        with audit.watch():
            linked = all(t == captured[0] for t in captured[1:])
    else:
        detail = "insufficient runs with a captured tag token"

    return _assert_zero_reads(AttackReport(
        ATTACK_BACKWARD_TRACE, success, linked, transcripts, audit.reads, detail))


# --- relay impersonation ---

def impersonate(reader1: ReaderState, reader2: ReaderState, target_ident: IdOrName,
                capabilities: AdversaryCapabilities, rng: RngState | None = None,
                channel_factory: Callable[[], Channel] | None = None) -> AttackReport:
    """Authenticate to reader1 as the target tag by relaying reader2's answer.

    The adversary replies to reader1 with the target's ident and an arbitrary
    nonce, then opens a session with reader2 reusing reader1's nonce; the
    token reader2 computes is exactly the answer reader1 expects. The target
    tag itself is never involved and no key is ever read.
    """
    _require(capabilities, act_as_reader=True)
    audit = KeyReadAudit()
    factory = channel_factory or (lambda: Channel(capabilities))
    rng = rng if rng is not None else seed_rng(0)
    adversary = "adversary"
    ch1, ch2 = factory(), factory()

    def report(success: bool, detail: str = "") -> AttackReport:
        reader1.pending = None
        reader2.pending = None
        return _assert_zero_reads(AttackReport(
            ATTACK_IMPERSONATION, success, None, [ch1.events, ch2.events],
            audit.reads, detail))

    ch1.transmit(Direction.FORWARD, Query(), reader1.label, adversary)
    with audit.watch():
        arbitrary_nonce, rng = next_nonce(rng)
        opening = TagReply(target_ident, arbitrary_nonce)
    delivered = ch1.transmit(Direction.BACKWARD, opening, adversary, reader1.label)
    try:
        challenge1 = reader_auth_step(reader1, delivered)
    except (UnknownIdentifier, NoDatabase) as exc:
        return report(False, f"reader1: {exc}")
    challenge1 = ch1.transmit(Direction.FORWARD, challenge1, reader1.label, adversary)

    ch2.transmit(Direction.FORWARD, Query(), reader2.label, adversary)
    with audit.watch():
        relay = TagReply(target_ident, challenge1.reader_nonce)
    delivered = ch2.transmit(Direction.BACKWARD, relay, adversary, reader2.label)
    try:
        challenge2 = reader_auth_step(reader2, delivered)
    except (UnknownIdentifier, NoDatabase) as exc:
        return report(False, f"reader2: {exc}")
    challenge2 = ch2.transmit(Direction.FORWARD, challenge2, reader2.label, adversary)

    with audit.watch():
        answer = TagAuth(challenge2.reader_token)  # reader2's token, relayed verbatim
    delivered = ch1.transmit(Direction.BACKWARD, answer, adversary, reader1.label)
    accepted = reader_verify(reader1, delivered)
    return report(accepted)


# --- indistinguishability game ---

class GameStrategy(Enum):
    FORWARD_TRACE = "forward_trace"
    BACKWARD_TRACE = "backward_trace"
    CONSTANT_ID = "constant_id"
    BLIND = "blind"           # control: guesses at random, ignores observations


def _trace_feature(tag: TagState, strategy: GameStrategy, constant: int,
                   capabilities: AdversaryCapabilities,
                   checkout_reader: ReaderState | None,
                   return_reader: ReaderState | None, audit: KeyReadAudit):
    runner = make_session_runner(tag, checkout_reader, return_reader)
    channel = Channel(capabilities)
    if strategy is GameStrategy.FORWARD_TRACE:
        def rewrite(msg, direction):
            if direction is Direction.BACKWARD and isinstance(msg, TagReply):
                return Replace(TagReply(msg.ident, constant))
            return Pass()
        wanted = ReaderAuth
    else:
        def rewrite(msg, direction):
            if direction is Direction.FORWARD and isinstance(msg, ReaderAuth):
                return Replace(ReaderAuth(msg.reader_token, constant))
            return Pass()
        wanted = TagAuth
    channel.attach(Interceptor(audit.wrap(rewrite), requires=_INTERCEPT_CAPS))
    runner(channel)
    with audit.watch():
        for _, msg in channel.eavesdrop_log(capabilities):
            if isinstance(msg, wanted):
                return msg.reader_token if wanted is ReaderAuth else msg.tag_token
    raise MalformedLog(f"observation captured no {wanted.__name__}")


def _ident_feature(tag: TagState, reader: ReaderState,
                   capabilities: AdversaryCapabilities, audit: KeyReadAudit):
    channel = Channel(capabilities)
    make_readonly_runner(tag, reader)(channel)
    with audit.watch():
        for _, msg in channel.eavesdrop_log(capabilities):
            if isinstance(msg, TagReply):
                return msg.ident
    raise MalformedLog("observation captured no tag reply")


def privacy_game(tag_a: TagState, tag_b: TagState, strategy: GameStrategy,
                 trials: int, rng: RngState, capabilities: AdversaryCapabilities,
                 checkout_reader: ReaderState | None = None,
                 return_reader: ReaderState | None = None,
                 constant: int | None = None) -> float:
    """Two-tag distinguishing game; returns the adversary advantage in [0, 1].

    Per trial the first observation is always of tag_a; a hidden coin picks
    the tag behind the second observation; the strategy's linked verdict is
    the guess. Advantage is |2 Pr[correct] - 1| over the trials.
    """
    if trials < 1:
        raise ValueError("trials must be positive")

    if strategy in (GameStrategy.FORWARD_TRACE, GameStrategy.BACKWARD_TRACE):
        _require(capabilities, eavesdrop=True, intercept=True)
        if tag_a.key == tag_b.key:
            raise DegenerateGame("trace strategies cannot separate equal keys")
    elif strategy is GameStrategy.CONSTANT_ID:
        if not capabilities.eavesdrop_backward:
            raise CapabilityMissing("ident linking needs backward-channel eavesdropping")
        if tag_a.id == tag_b.id or tag_a.name == tag_b.name:
            raise DegenerateGame("ident linking needs distinct IDs and names")

    audit = KeyReadAudit()
    if constant is None:
        constant, rng = next_nonce(rng)
    constant &= MASK64

    def observe(tag: TagState):
        if strategy is GameStrategy.CONSTANT_ID:
            reader = checkout_reader or return_reader
            if reader is None:
                raise ValueError("ident linking needs a reader to query the tag")
            return _ident_feature(tag, reader, capabilities, audit)
        return _trace_feature(tag, strategy, constant, capabilities,
                              checkout_reader, return_reader, audit)

    correct = 0
    for _ in range(trials):
        coin, rng = next_nonce(rng)
        challenge = tag_a if coin & 1 == 0 else tag_b
        if strategy is GameStrategy.BLIND:
            guess_bit, rng = next_nonce(rng)
            guessed_same = bool(guess_bit & 1)
        else:
            reference = observe(tag_a)
            probe = observe(challenge)
            with audit.watch():
                guessed_same = reference == probe
        if guessed_same == (challenge is tag_a):
            correct += 1

    assert audit.reads == 0, f"privacy game adversary read key material {audit.reads} time(s)"
    return abs(2.0 * correct / trials - 1.0)


# --- campaign wrappers over the linkers (used by the scenario runner) ---

def constant_id_campaign(runner_first: SessionRunner, runner_second: SessionRunner,
                         capabilities: AdversaryCapabilities,
                         channel_factory: Callable[[], Channel] | None = None) -> AttackReport:
    """Observe two read-only sessions and link them by ident equality."""
    if not capabilities.eavesdrop_backward:
        raise CapabilityMissing("ident linking needs backward-channel eavesdropping")
    audit = KeyReadAudit()
    factory = channel_factory or (lambda: Channel(capabilities))
    transcripts = []
    logs = []
    for runner in (runner_first, runner_second):
        channel = factory()
        _, events = runner(channel)
        transcripts.append(events)
        logs.append(channel.eavesdrop_log(capabilities))
    with audit.watch():
        linked = link_by_constant_id(logs[0], logs[1])
    return _assert_zero_reads(AttackReport(
        ATTACK_CONSTANT_ID_LINK, True, linked, transcripts, audit.reads))


def constellation_campaign(holder_a: Sequence[TagState], holder_b: Sequence[TagState],
                           reader: ReaderState, capabilities: AdversaryCapabilities,
                           channel_factory: Callable[[], Channel] | None = None) -> AttackReport:
    """Observe each holder's tags once and link holders by name multisets.

    Tags must be in name-revealing state (privacy bit 1); an ID observation
    means the holder is not outside the store and the campaign is malformed.
    """
    if not capabilities.eavesdrop_backward:
        raise CapabilityMissing("constellation linking needs backward-channel eavesdropping")
    audit = KeyReadAudit()
    factory = channel_factory or (lambda: Channel(capabilities))
    transcripts = []

    def observe_names(holder: Sequence[TagState]) -> list[int]:
        names = []
        for tag in holder:
            channel = factory()
            _, events = make_readonly_runner(tag, reader)(channel)
            transcripts.append(events)
            with audit.watch():
                for _, msg in channel.eavesdrop_log(capabilities):
                    if isinstance(msg, TagReply):
                        if not isinstance(msg.ident, TagName):
                            raise MalformedLog("holder tag replied with an ID, not a name")
                        names.append(msg.ident.value)
        return names

    names_a = observe_names(holder_a)
    names_b = observe_names(holder_b)
    with audit.watch():
        linked = link_by_constellation(names_a, names_b)
    return _assert_zero_reads(AttackReport(
        ATTACK_CONSTELLATION_LINK, True, linked, transcripts, audit.reads))
