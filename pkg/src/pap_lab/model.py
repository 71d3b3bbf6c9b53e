"""Domain entities: tags, reader classes, key database, adversary capabilities.

Every access to a tag secret key (directly or through the database) bumps a
module-level counter; the attack harness snapshots it around adversary code
to certify that attacks never touch key material.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .crypto import MASK32, MASK64, MASK96, RngState
from .errors import (
    DuplicateId,
    InvalidCapabilityCombo,
    NameKeyConflict,
    UnknownIdentifier,
)
from .wire import IdOrName, TagId, TagName

_key_reads = 0


def key_read_count() -> int:
    """Total secret-key reads so far (tags and database combined)."""
    return _key_reads


def _count_key_read() -> None:
    global _key_reads
    _key_reads += 1


class ReaderKind(Enum):
    INVENTORY = "inventory"   # can query tags but holds no database
    CHECKOUT = "checkout"
    RETURN = "return"


class TagState:
    """One tag: secret key, static ID, generic name, privacy bit, nonce stream.

    The ID and name are fixed for the tag's lifetime. The privacy bit is 0 in
    a secure location (tag answers with its ID) and 1 in an insecure one (tag
    answers with its generic name); it changes only through verified checkout
    (0 to 1) and return (1 to 0) runs.
    """

    def __init__(self, tag_id: int, name: int, key: int, rng: RngState,
                 privacy_bit: int = 0, label: str = "tag"):
        if privacy_bit not in (0, 1):
            raise ValueError(f"privacy bit must be 0 or 1, got {privacy_bit}")
        self._id = tag_id & MASK96
        self._name = name & MASK32
        self._key = key & MASK64
        self.privacy_bit = privacy_bit
        self.rng = rng
        self.label = label
        self.pending_nonce: int | None = None   # nonce of the in-flight session, if any

    @property
    def id(self) -> int:
        return self._id

    @property
    def name(self) -> int:
        return self._name

    @property
    def key(self) -> int:
        _count_key_read()
        return self._key

    def wire_ident(self) -> IdOrName:
        return TagId(self._id) if self.privacy_bit == 0 else TagName(self._name)

    def __repr__(self) -> str:
        return f"TagState(label={self.label!r}, id={self._id:#x}, privacy_bit={self.privacy_bit})"


class KeyDatabase:
    """Back-end key store indexed by static ID and by generic name.

    Keys looked up by name are per product type: every tag sharing a name
    must share the key, enforced at registration.
    """

    def __init__(self):
        self.by_id: dict[int, int] = {}
        self.by_name: dict[int, int] = {}

    def register(self, tag: TagState) -> None:
        if tag.id in self.by_id:
            raise DuplicateId(f"id {tag.id:#x} already registered")
        key = tag.key
        existing = self.by_name.get(tag.name)
        if existing is not None and existing != key:
            raise NameKeyConflict(f"name {tag.name:#x} already registered with a different key")
        self.by_id[tag.id] = key
        self.by_name[tag.name] = key

    def lookup(self, ident: IdOrName) -> int:
        if isinstance(ident, TagId):
            index, kind = self.by_id, "id"
        elif isinstance(ident, TagName):
            index, kind = self.by_name, "name"
        else:
            raise TypeError(f"not an ident: {ident!r}")
        try:
            key = index[ident.value]
        except KeyError:
            raise UnknownIdentifier(f"{kind} {ident.value:#x} not registered") from None
        _count_key_read()
        return key


@dataclass(frozen=True)
class PendingAuth:
    """Reader-side expectation between sending its challenge and the tag's answer."""

    expected_token: int
    nonce_sent: int


class ReaderState:
    """One reader of a given class; inventory readers hold no database."""

    def __init__(self, kind: ReaderKind, db: KeyDatabase | None, rng: RngState,
                 label: str = "reader"):
        if kind is ReaderKind.INVENTORY and db is not None:
            raise ValueError("inventory readers are not connected to a database")
        self.kind = kind
        self.db = db
        self.rng = rng
        self.label = label
        self.pending: PendingAuth | None = None

    def __repr__(self) -> str:
        return f"ReaderState(label={self.label!r}, kind={self.kind.value})"


@dataclass(frozen=True)
class AdversaryCapabilities:
    """What the attacker may do on each channel.

    intercept (modify/drop in flight) requires both eavesdrop flags: the
    adversary cannot rewrite what it cannot read.
    """

    eavesdrop_forward: bool = False
    eavesdrop_backward: bool = False
    intercept: bool = False
    act_as_reader: bool = False

    def __post_init__(self):
        if self.intercept and not (self.eavesdrop_forward and self.eavesdrop_backward):
            raise InvalidCapabilityCombo("intercept requires eavesdropping on both channels")

    @classmethod
    def none(cls) -> "AdversaryCapabilities":
        return cls()

    @classmethod
    def full(cls) -> "AdversaryCapabilities":
        return cls(True, True, True, True)
