"""Exception hierarchy shared across the simulator."""


class PapLabError(Exception):
    """Base class for all simulator errors."""


# --- frame codec ---

class CodecError(PapLabError):
    """A byte sequence could not be decoded into a wire message."""


class BadCrc(CodecError):
    """Trailing CRC-16 does not match the frame contents."""


class UnknownMessageTag(CodecError):
    """Leading tag byte (or ident discriminator) is not part of the message set."""


class TruncatedFrame(CodecError):
    """Frame length does not match the declared message structure."""


# --- database / entities ---

class UnknownIdentifier(PapLabError):
    """Lookup of an ID or generic name that is not registered."""


class DuplicateId(PapLabError):
    """A tag ID was registered twice."""


class NameKeyConflict(PapLabError):
    """A generic name was re-registered with a different key."""


class InvalidCapabilityCombo(PapLabError):
    """Adversary capability flags violate 'intercept requires eavesdrop'."""


# --- protocol state machine ---

class NoDatabase(PapLabError):
    """Reader without database access asked to authenticate a tag."""


class NoPendingSession(PapLabError):
    """Reader-side verification invoked with no authentication in flight."""


# --- channel ---

class CapabilityViolation(PapLabError):
    """An interceptor acted beyond the capabilities granted to the adversary.

    This is a harness assertion, not an in-protocol event.
    """


# --- attacks ---

class CapabilityMissing(PapLabError):
    """An attack was launched without the capabilities it requires."""


class MalformedLog(PapLabError):
    """An eavesdropped session log lacks the message the linker needs."""


class NoTagAuth(PapLabError):
    """Backward-channel trace run produced no tag answer (third-party tampering)."""


class DegenerateGame(PapLabError):
    """The two game tags share all identifying material for the chosen strategy."""


# --- scenario runner ---

class ScenarioError(PapLabError):
    """Base class for scenario file and run-report problems."""


class ParseError(ScenarioError):
    """Scenario file is not well-formed."""


class UnknownEntityRef(ScenarioError):
    """A program step references an undeclared tag or reader."""


class SchemaError(ScenarioError):
    """A transcript line does not match the JSONL event schema."""
