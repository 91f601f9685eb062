from __future__ import annotations

import json

import pytest

from logquery.errors import InputError
from logquery.ingest import LogLine
from logquery.templates import Template, TemplateSet, WILDCARD


def make_set():
    return TemplateSet(
        (
            Template(
                pattern=("session", "opened", "for", "user", WILDCARD),
                example=LogLine(7, "session opened for user root"),
                count=12,
            ),
            Template(pattern=("tick",), example=LogLine(2, "tick"), count=3),
        )
    )


class TestTemplate:
    def test_pattern_text_joins_tokens(self):
        t = make_set().templates[0]
        assert t.pattern_text == "session opened for user <*>"


class TestTemplateSet:
    def test_len_and_iter(self):
        ts = make_set()
        assert len(ts) == 2
        assert [t.count for t in ts] == [12, 3]

    def test_save_format(self, tmp_path):
        p = tmp_path / "t.jsonl"
        make_set().save(p)
        records = [json.loads(line) for line in p.read_text().splitlines()]
        assert records[0] == {
            "pattern": "session opened for user <*>",
            "example": "session opened for user root",
            "count": 12,
        }

    def test_round_trip_preserves_patterns_and_counts(self, tmp_path):
        p = tmp_path / "t.jsonl"
        original = make_set()
        original.save(p)
        loaded = TemplateSet.load(p)
        assert [(t.pattern, t.example.raw, t.count) for t in loaded] == [
            (t.pattern, t.example.raw, t.count) for t in original
        ]

    def test_loaded_example_index_is_record_ordinal(self, tmp_path):
        p = tmp_path / "t.jsonl"
        make_set().save(p)
        loaded = TemplateSet.load(p)
        assert [t.example.index for t in loaded] == [1, 2]

    def test_double_round_trip_is_byte_stable(self, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        make_set().save(a)
        TemplateSet.load(a).save(b)
        assert a.read_bytes() == b.read_bytes()

    def test_blank_lines_skipped_on_load(self, tmp_path):
        p = tmp_path / "t.jsonl"
        p.write_text('{"pattern": "a b", "example": "a b", "count": 2}\n\n')
        assert len(TemplateSet.load(p)) == 1

    @pytest.mark.parametrize(
        "line",
        [
            "not json",
            '{"pattern": "a"}',
            '{"pattern": 1, "example": "x", "count": 2}',
            '{"pattern": "a", "example": "x", "count": "two"}',
        ],
    )
    def test_bad_records_name_their_position(self, tmp_path, line):
        p = tmp_path / "t.jsonl"
        p.write_text('{"pattern": "ok", "example": "ok", "count": 1}\n' + line + "\n")
        with pytest.raises(InputError, match="record 2"):
            TemplateSet.load(p)
