"""Honest execution of the four location sub-protocols as explicit steps
driven over a channel.

In-store and out-store runs are two messages (query, reply) and offer no
authentication. Checkout and return add the mutual-authentication exchange:
the reader proves knowledge of the tag's key by hashing the tag's nonce, the
tag answers by hashing the reader's nonce, and the tag's privacy bit flips
on successful reader authentication (0 to 1 at checkout, 1 to 0 at return).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .channel import Channel, Direction, TranscriptEvent
from .crypto import auth_hash, next_nonce
from .errors import NoDatabase, NoPendingSession, UnknownIdentifier
from .model import PendingAuth, ReaderKind, ReaderState, TagState
from .wire import Message, Query, ReaderAuth, TagAuth, TagReply


class SubProtocol(Enum):
    IN_STORE = "in_store"
    CHECKOUT = "checkout"
    OUT_STORE = "out_store"
    RETURN = "return"


AUTHENTICATED = (SubProtocol.CHECKOUT, SubProtocol.RETURN)

# privacy bit required at session start
_REQUIRED_BIT = {
    SubProtocol.IN_STORE: 0,
    SubProtocol.CHECKOUT: 0,
    SubProtocol.OUT_STORE: 1,
    SubProtocol.RETURN: 1,
}

# reader kind required to drive the sub-protocol (None: any kind may query)
_REQUIRED_READER = {
    SubProtocol.IN_STORE: None,
    SubProtocol.CHECKOUT: ReaderKind.CHECKOUT,
    SubProtocol.OUT_STORE: None,
    SubProtocol.RETURN: ReaderKind.RETURN,
}

_HONEST_TYPES = {
    Direction.FORWARD: (Query, ReaderAuth),
    Direction.BACKWARD: (TagReply, TagAuth),
}


@dataclass
class SessionVerdict:
    subprotocol: SubProtocol
    privacy_bit_before: int
    privacy_bit_after: int
    reader_accepted_tag: bool = False
    tag_accepted_reader: bool = False
    aborted: str | None = None

    @property
    def mutual(self) -> bool:
        return self.reader_accepted_tag and self.tag_accepted_reader

    def to_json(self) -> dict:
        return {
            "subprotocol": self.subprotocol.value,
            "reader_accepted_tag": self.reader_accepted_tag,
            "tag_accepted_reader": self.tag_accepted_reader,
            "privacy_bit_before": self.privacy_bit_before,
            "privacy_bit_after": self.privacy_bit_after,
            "aborted": self.aborted,
        }


def tag_respond_query(tag: TagState) -> TagReply:
    """Tag answer to a query: ident per privacy bit plus a fresh nonce.

    Starts a new tag-side session; any previously outstanding nonce is
    discarded.
    """
    nonce, tag.rng = next_nonce(tag.rng)
    tag.pending_nonce = nonce
    return TagReply(tag.wire_ident(), nonce)


def reader_auth_step(reader: ReaderState, reply: TagReply) -> ReaderAuth:
    """Reader challenge: token over the tag's nonce plus a fresh reader nonce.

    Raises NoDatabase for inventory readers and UnknownIdentifier when the
    reply's ident is not registered; either aborts the session.
    """
    if reader.db is None:
        raise NoDatabase(f"reader {reader.label!r} ({reader.kind.value}) cannot authenticate")
    key = reader.db.lookup(reply.ident)
    token = auth_hash(reply.tag_nonce, key)
    nonce, reader.rng = next_nonce(reader.rng)
    reader.pending = PendingAuth(expected_token=auth_hash(nonce, key), nonce_sent=nonce)
    return ReaderAuth(token, nonce)


def tag_verify_and_answer(tag: TagState, msg: ReaderAuth,
                          expected_nonce: int | None) -> tuple[TagAuth | None, bool]:
    """Tag-side check of the reader token; answers only on acceptance.

    On acceptance the privacy bit flips (checkout 0 to 1, return 1 to 0) and
    the tag emits its own token over the reader's nonce. On rejection the
    tag stays silent and its state is unchanged apart from ending the
    session.
    """
    tag.pending_nonce = None
    if expected_nonce is None or msg.reader_token != auth_hash(expected_nonce, tag.key):
        return None, False
    tag.privacy_bit ^= 1
    return TagAuth(auth_hash(msg.reader_nonce, tag.key)), True


def reader_verify(reader: ReaderState, msg: TagAuth) -> bool:
    """Reader-side check of the tag token against the pending expectation."""
    if reader.pending is None:
        raise NoPendingSession("no authentication in flight")
    accepted = msg.tag_token == reader.pending.expected_token
    reader.pending = None
    return accepted


def run_session(subprotocol: SubProtocol, tag: TagState, reader: ReaderState,
                channel: Channel) -> tuple[SessionVerdict, list[TranscriptEvent]]:
    """Drive one full sub-protocol session over the channel.

    Precondition violations and in-flight failures are reported through
    SessionVerdict.aborted, never raised. Returns the verdict plus the
    transcript events this session appended.
    """
    first_event = len(channel.events)
    bit_before = tag.privacy_bit
    verdict = SessionVerdict(subprotocol, bit_before, bit_before)

    def finish(aborted: str | None = None) -> tuple[SessionVerdict, list[TranscriptEvent]]:
        if aborted is not None:
            verdict.aborted = aborted
        verdict.privacy_bit_after = tag.privacy_bit
        return verdict, channel.events[first_event:]

    def send(direction: Direction, msg: Message, sender: str, receiver: str) -> Message | None:
        assert isinstance(msg, _HONEST_TYPES[direction])  # honest endpoints only
        return channel.transmit(direction, msg, sender, receiver)

    if tag.privacy_bit != _REQUIRED_BIT[subprotocol]:
        return finish(f"precondition: privacy bit {tag.privacy_bit} "
                      f"incompatible with {subprotocol.value}")
    required_kind = _REQUIRED_READER[subprotocol]
    if required_kind is not None and reader.kind is not required_kind:
        return finish(f"precondition: {reader.kind.value} reader "
                      f"cannot drive {subprotocol.value}")

    if send(Direction.FORWARD, Query(), reader.label, tag.label) is None:
        return finish("dropped: query")

    reply = tag_respond_query(tag)
    delivered_reply = send(Direction.BACKWARD, reply, tag.label, reader.label)

    if subprotocol not in AUTHENTICATED:
        return finish()  # read-only sub-protocols stop after the tag reply

    if delivered_reply is None:
        return finish("dropped: tag_reply")

    try:
        challenge = reader_auth_step(reader, delivered_reply)
    except NoDatabase:
        return finish("no_database")
    except UnknownIdentifier:
        return finish("unknown_identifier")

    delivered_challenge = send(Direction.FORWARD, challenge, reader.label, tag.label)
    if delivered_challenge is None:
        reader.pending = None
        return finish("dropped: reader_auth")

    answer, accepted = tag_verify_and_answer(tag, delivered_challenge, tag.pending_nonce)
    verdict.tag_accepted_reader = accepted
    if answer is None:
        reader.pending = None  # tag stayed silent; reader times out
        return finish()

    delivered_answer = send(Direction.BACKWARD, answer, tag.label, reader.label)
    if delivered_answer is None:
        reader.pending = None
        return finish("dropped: tag_auth")

    verdict.reader_accepted_tag = reader_verify(reader, delivered_answer)
    return finish()
