"""Wire messages and the byte-exact frame codec.

Frame layout (big-endian, CRC-16/CCITT-FALSE over all preceding bytes
appended last):

    Query       [0x01][crc16]
    TagReply    [0x02][ident_tag 0x00=id|0x01=name][ident 12B|4B][nonce 8B][crc16]
    ReaderAuth  [0x03][token 8B][nonce 8B][crc16]
    TagAuth     [0x04][token 8B][crc16]
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .crypto import crc16
from .errors import BadCrc, TruncatedFrame, UnknownMessageTag

TAG_QUERY = 0x01
TAG_TAG_REPLY = 0x02
TAG_READER_AUTH = 0x03
TAG_TAG_AUTH = 0x04

IDENT_TAG_ID = 0x00
IDENT_TAG_NAME = 0x01

ID_BYTES = 12       # 96-bit static identifier
NAME_BYTES = 4      # 32-bit generic name (product type)
WORD_BYTES = 8      # 64-bit nonces and tokens
CRC_BYTES = 2


@dataclass(frozen=True)
class TagId:
    """Unique 96-bit static identifier; on the wire only while the privacy bit is 0."""

    value: int


@dataclass(frozen=True)
class TagName:
    """Non-unique 32-bit generic name; on the wire only while the privacy bit is 1."""

    value: int


IdOrName = Union[TagId, TagName]


@dataclass(frozen=True)
class Query:
    """Reader-to-tag interrogation; carries no fields."""


@dataclass(frozen=True)
class TagReply:
    ident: IdOrName
    tag_nonce: int


@dataclass(frozen=True)
class ReaderAuth:
    reader_token: int   # hash(tag_nonce, key), proves the reader knows the key
    reader_nonce: int


@dataclass(frozen=True)
class TagAuth:
    tag_token: int      # hash(reader_nonce, key), proves the tag knows the key


Message = Union[Query, TagReply, ReaderAuth, TagAuth]


def _seal(body: bytes) -> bytes:
    return body + crc16(body).to_bytes(CRC_BYTES, "big")


def encode_message(msg: Message) -> bytes:
    """Serialize a message to its framed byte form (CRC appended)."""
    if isinstance(msg, Query):
        return _seal(bytes([TAG_QUERY]))
    if isinstance(msg, TagReply):
        if isinstance(msg.ident, TagId):
            ident = bytes([IDENT_TAG_ID]) + msg.ident.value.to_bytes(ID_BYTES, "big")
        else:
            ident = bytes([IDENT_TAG_NAME]) + msg.ident.value.to_bytes(NAME_BYTES, "big")
        return _seal(bytes([TAG_TAG_REPLY]) + ident + msg.tag_nonce.to_bytes(WORD_BYTES, "big"))
    if isinstance(msg, ReaderAuth):
        body = (
            bytes([TAG_READER_AUTH])
            + msg.reader_token.to_bytes(WORD_BYTES, "big")
            + msg.reader_nonce.to_bytes(WORD_BYTES, "big")
        )
        return _seal(body)
    if isinstance(msg, TagAuth):
        return _seal(bytes([TAG_TAG_AUTH]) + msg.tag_token.to_bytes(WORD_BYTES, "big"))
    raise TypeError(f"not a wire message: {msg!r}")


def decode_message(frame: bytes) -> Message:
    """Parse a framed byte sequence back into exactly one message variant.

    Raises TruncatedFrame on any length mismatch, UnknownMessageTag on an
    unrecognized tag or ident discriminator, BadCrc on checksum failure.
    """
    if len(frame) < 1 + CRC_BYTES:
        raise TruncatedFrame(f"frame of {len(frame)} bytes cannot hold tag and CRC")
    tag = frame[0]

    if tag == TAG_QUERY:
        expected = 1 + CRC_BYTES
    elif tag == TAG_TAG_REPLY:
        if len(frame) < 2 + CRC_BYTES:
            raise TruncatedFrame("tag reply frame too short for ident discriminator")
        ident_tag = frame[1]
        if ident_tag == IDENT_TAG_ID:
            ident_len = ID_BYTES
        elif ident_tag == IDENT_TAG_NAME:
            ident_len = NAME_BYTES
        else:
            raise UnknownMessageTag(f"unknown ident discriminator 0x{ident_tag:02x}")
        expected = 2 + ident_len + WORD_BYTES + CRC_BYTES
    elif tag == TAG_READER_AUTH:
        expected = 1 + 2 * WORD_BYTES + CRC_BYTES
    elif tag == TAG_TAG_AUTH:
        expected = 1 + WORD_BYTES + CRC_BYTES
    else:
        raise UnknownMessageTag(f"unknown message tag 0x{tag:02x}")

    if len(frame) != expected:
        raise TruncatedFrame(f"expected {expected} bytes for tag 0x{tag:02x}, got {len(frame)}")

    body, trailer = frame[:-CRC_BYTES], frame[-CRC_BYTES:]
    if crc16(body) != int.from_bytes(trailer, "big"):
        raise BadCrc("checksum mismatch")

    if tag == TAG_QUERY:
        return Query()
    if tag == TAG_TAG_REPLY:
        ident_tag = frame[1]
        if ident_tag == IDENT_TAG_ID:
            ident: IdOrName = TagId(int.from_bytes(frame[2:2 + ID_BYTES], "big"))
            offset = 2 + ID_BYTES
        else:
            ident = TagName(int.from_bytes(frame[2:2 + NAME_BYTES], "big"))
            offset = 2 + NAME_BYTES
        return TagReply(ident, int.from_bytes(frame[offset:offset + WORD_BYTES], "big"))
    if tag == TAG_READER_AUTH:
        return ReaderAuth(
            int.from_bytes(frame[1:9], "big"),
            int.from_bytes(frame[9:17], "big"),
        )
    return TagAuth(int.from_bytes(frame[1:9], "big"))


def message_type_name(msg: Message) -> str:
    if isinstance(msg, Query):
        return "query"
    if isinstance(msg, TagReply):
        return "tag_reply"
    if isinstance(msg, ReaderAuth):
        return "reader_auth"
    if isinstance(msg, TagAuth):
        return "tag_auth"
    raise TypeError(f"not a wire message: {msg!r}")


def fields_hex(msg: Message) -> dict[str, str]:
    """Message fields as lowercase hex, zero-padded to their wire widths."""
    if isinstance(msg, Query):
        return {}
    if isinstance(msg, TagReply):
        if isinstance(msg.ident, TagId):
            ident_tag, ident = "00", f"{msg.ident.value:0{2 * ID_BYTES}x}"
        else:
            ident_tag, ident = "01", f"{msg.ident.value:0{2 * NAME_BYTES}x}"
        return {"ident_tag": ident_tag, "ident": ident, "tag_nonce": f"{msg.tag_nonce:016x}"}
    if isinstance(msg, ReaderAuth):
        return {
            "reader_token": f"{msg.reader_token:016x}",
            "reader_nonce": f"{msg.reader_nonce:016x}",
        }
    if isinstance(msg, TagAuth):
        return {"tag_token": f"{msg.tag_token:016x}"}
    raise TypeError(f"not a wire message: {msg!r}")
