"""Entities: key database indexing, tag/reader invariants, capability flags."""

import pytest

from pap_lab import (
    AdversaryCapabilities,
    KeyDatabase,
    ReaderKind,
    ReaderState,
    TagId,
    TagName,
    TagState,
    seed_rng,
)
from pap_lab.errors import (
    DuplicateId,
    InvalidCapabilityCombo,
    NameKeyConflict,
    UnknownIdentifier,
)


def make_tag(tag_id=1, name=7, key=3, bit=0):
    return TagState(tag_id, name, key, seed_rng(0), privacy_bit=bit)


class TestKeyDatabase:
    def test_lookup_by_id_round_trip(self):
        db = KeyDatabase()
        db.register(make_tag(tag_id=5, key=9))
        assert db.lookup(TagId(5)) == 9

    def test_shared_name_shares_key(self):
        db = KeyDatabase()
        db.register(make_tag(tag_id=1, name=7, key=3))
        db.register(make_tag(tag_id=2, name=7, key=3))
        assert db.lookup(TagName(7)) == 3

    def test_unknown_identifier(self):
        db = KeyDatabase()
        with pytest.raises(UnknownIdentifier):
            db.lookup(TagId(42))
        with pytest.raises(UnknownIdentifier):
            db.lookup(TagName(42))

    def test_duplicate_id_rejected(self):
        db = KeyDatabase()
        db.register(make_tag(tag_id=1))
        with pytest.raises(DuplicateId):
            db.register(make_tag(tag_id=1, name=8))

    def test_name_key_conflict_rejected(self):
        db = KeyDatabase()
        db.register(make_tag(tag_id=3, name=7, key=3))
        with pytest.raises(NameKeyConflict):
            db.register(make_tag(tag_id=4, name=7, key=4))

    def test_registration_populates_both_indexes(self):
        db = KeyDatabase()
        db.register(make_tag(tag_id=1, name=7, key=3))
        assert db.by_id == {1: 3}
        assert db.by_name == {7: 3}


class TestTagState:
    def test_ident_follows_privacy_bit(self):
        tag = make_tag(tag_id=11, name=22)
        assert tag.wire_ident() == TagId(11)
        tag.privacy_bit = 1
        assert tag.wire_ident() == TagName(22)

    def test_privacy_bit_validated(self):
        with pytest.raises(ValueError):
            make_tag(bit=2)

    def test_id_and_name_read_only(self):
        tag = make_tag()
        with pytest.raises(AttributeError):
            tag.id = 99
        with pytest.raises(AttributeError):
            tag.name = 99


class TestReaderState:
    def test_inventory_reader_cannot_hold_database(self):
        with pytest.raises(ValueError):
            ReaderState(ReaderKind.INVENTORY, KeyDatabase(), seed_rng(0))

    def test_inventory_reader_without_database_ok(self):
        reader = ReaderState(ReaderKind.INVENTORY, None, seed_rng(0))
        assert reader.db is None and reader.pending is None


class TestAdversaryCapabilities:
    def test_intercept_requires_both_eavesdrop_flags(self):
        with pytest.raises(InvalidCapabilityCombo):
            AdversaryCapabilities(eavesdrop_forward=True, intercept=True)
        with pytest.raises(InvalidCapabilityCombo):
            AdversaryCapabilities(eavesdrop_backward=True, intercept=True)

    def test_presets(self):
        assert not any(vars(AdversaryCapabilities.none()).values())
        assert all(vars(AdversaryCapabilities.full()).values())
