"""pap-lab: deterministic simulator and adversary harness for the PAP RFID
authentication protocol (tags, reader classes, back-end database, radio
channels, traceability and relay impersonation attacks)."""

from .attacks import (
    AttackReport,
    GameStrategy,
    backward_trace,
    forward_trace,
    impersonate,
    link_by_constant_id,
    link_by_constellation,
    make_readonly_runner,
    make_session_runner,
    privacy_game,
)
from .channel import Channel, Direction, Drop, Interceptor, Pass, Replace, SeqCounter
from .crypto import RngState, auth_hash, cover_code, crc16, next_nonce, seed_rng
from .kernels import BACKEND as KERNEL_BACKEND
from .model import (
    AdversaryCapabilities,
    KeyDatabase,
    ReaderKind,
    ReaderState,
    TagState,
)
from .protocol import SessionVerdict, SubProtocol, run_session
from .scenario import (
    Scenario,
    load_scenario,
    parse_scenario,
    run_scenario,
    summarize_directory,
    summarize_transcripts,
)
from .wire import (
    Message,
    Query,
    ReaderAuth,
    TagAuth,
    TagId,
    TagName,
    TagReply,
    decode_message,
    encode_message,
)

__version__ = "0.1.0"

__all__ = [
    "AdversaryCapabilities", "AttackReport", "Channel", "Direction", "Drop",
    "GameStrategy", "Interceptor", "KeyDatabase", "KERNEL_BACKEND", "Message",
    "Pass", "Query", "ReaderAuth", "ReaderKind", "ReaderState", "Replace",
    "RngState", "Scenario", "SeqCounter", "SessionVerdict", "SubProtocol",
    "TagAuth", "TagId", "TagName", "TagReply", "TagState", "auth_hash",
    "backward_trace", "cover_code", "crc16", "decode_message", "encode_message",
    "forward_trace", "impersonate", "link_by_constant_id",
    "link_by_constellation", "load_scenario", "make_readonly_runner",
    "make_session_runner", "next_nonce", "parse_scenario", "privacy_game",
    "run_scenario", "run_session", "seed_rng", "summarize_directory",
    "summarize_transcripts",
]
