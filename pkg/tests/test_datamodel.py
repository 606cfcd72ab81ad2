import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agenthost.datamodel import (
    Artifact,
    ArtifactFactory,
    ErrorInfo,
    FileBlob,
    Kind,
    Table,
    from_record,
    linearize,
    render_frontend,
    table_from_csv,
    table_from_jsonl,
    to_record,
)


@pytest.fixture
def make():
    return ArtifactFactory()


def pack_rows_oracle(columns, rows, budget):
    """Brute-force row packing: emit rows one at a time, stop when adding the
    next (plus the elision marker) would exceed the budget."""
    header = " | ".join(columns)
    lines = [" | ".join(str(c) for c in r) for r in rows]
    full = "\n".join([header] + lines)
    if len(full) <= budget:
        return full
    marker = f"… ({len(rows)} rows total)"
    kept = [header]
    for line in lines:
        if len("\n".join(kept + [line, marker])) > budget:
            break
        kept.append(line)
    return "\n".join(kept + [marker])


class TestLinearize:
    def test_text_identity_under_budget(self, make):
        assert linearize(make.text("hello"), 100) == "hello"

    def test_text_tail_truncated_with_marker(self, make):
        out = linearize(make.text("x" * 500), 100)
        assert len(out) == 100
        assert out.endswith("…")
        assert out[:99] == "x" * 99

    def test_large_table_header_and_leading_rows(self, make):
        table = make.table(["a", "b"], [(i, i * 2) for i in range(1000)])
        out = linearize(table, 200)
        assert len(out) <= 200
        lines = out.split("\n")
        assert lines[0] == "a | b"
        assert lines[1] == "0 | 0"
        assert lines[-1] == "… (1000 rows total)"

    def test_small_table_untouched(self, make):
        table = make.table(["x"], [(1,), (2,)])
        assert linearize(table, 100) == "x\n1\n2"

    def test_row_packing_matches_bruteforce_oracle(self, make):
        # budget sized so exactly 7 single-digit rows fit next to the marker
        rows = [(i % 10,) for i in range(50)]
        table = make.table(["x"], rows)
        marker = "… (50 rows total)"
        budget = len("x") + 7 * 2 + 1 + len(marker)  # header + 7 rows + marker, newline-joined
        expected = pack_rows_oracle(["x"], rows, budget)
        got = linearize(table, budget)
        assert got == expected
        assert len(got.split("\n")) == 1 + 7 + 1

    def test_placeholder_forms(self, make):
        img = make.image(FileBlob(size=10, data=b"x" * 10), name="plot.png")
        assert linearize(img, 100) == "[image: plot.png (image/png)]"
        ref = make.file_ref(FileBlob(size=3, data=b"abc"), name="notes.txt", mime="text/plain")
        assert linearize(ref, 100) == "[file: notes.txt (text/plain)]"

    def test_chart_spec_is_its_json(self, make):
        spec = {"chart_type": "bar", "title": "t", "x": {"name": "x", "values": [1]}, "series": []}
        out = linearize(make.chart_spec(spec), 500)
        assert json.loads(out) == spec

    def test_rejects_nonpositive_budget(self, make):
        with pytest.raises(ValueError):
            linearize(make.text("a"), 0)

    @given(
        body=st.text(max_size=400),
        budget=st.integers(min_value=1, max_value=300),
    )
    def test_budget_is_hard_bound_for_text(self, body, budget):
        a = Artifact("a-0", Kind.TEXT, body)
        assert len(linearize(a, budget)) <= budget

    @given(
        n_cols=st.integers(min_value=1, max_value=5),
        n_rows=st.integers(min_value=0, max_value=40),
        budget=st.integers(min_value=1, max_value=400),
        seed=st.integers(min_value=0, max_value=2**16),
    )
    @settings(max_examples=150)
    def test_budget_is_hard_bound_for_tables(self, n_cols, n_rows, budget, seed):
        cols = [f"c{i}" for i in range(n_cols)]
        rows = [tuple((seed + i * j) % 997 for j in range(n_cols)) for i in range(n_rows)]
        a = Artifact("a-0", Kind.TABLE, Table(tuple(cols), tuple(rows)))
        assert len(linearize(a, budget)) <= budget


class TestRenderFrontend:
    def test_code_block(self, make):
        block = render_frontend(make.code("print(1)", lang="python"))
        assert block["block_type"] == "code"
        assert block["payload"] == {"text": "print(1)", "language": "python"}

    def test_chart_block_carries_spec(self, make):
        spec = {"chart_type": "line", "title": "", "x": {"name": "t", "values": []}, "series": []}
        block = render_frontend(make.chart_spec(spec))
        assert block["block_type"] == "chart"
        assert block["payload"] == spec

    def test_error_block_category(self, make):
        block = render_frontend(make.error("timeout", "took too long"))
        assert block["block_type"] == "error"
        assert block["payload"]["category"] == "timeout"

    def test_every_kind_renders(self, make):
        artifacts = [
            make.text("t"),
            make.code("c"),
            make.console("out"),
            make.table(["a"], [(1,)]),
            make.image(FileBlob(size=1, data=b"x")),
            make.file_ref(FileBlob(size=1, data=b"x"), name="f"),
            make.database_ref(FileBlob(size=1, data=b"x"), name="db"),
            make.chart_spec({"chart_type": "bar"}),
            make.card({"title": "T", "url": "http://x"}),
            make.error("tool_error", "boom"),
        ]
        assert {a.kind for a in artifacts} == set(Kind)
        for a in artifacts:
            block = render_frontend(a)
            assert block["block_type"] in (
                "markdown", "code", "table", "image", "chart", "console", "error", "card"
            )
            # round-trips through serialization byte-identically
            s = json.dumps(block, sort_keys=True)
            assert json.dumps(json.loads(s), sort_keys=True) == s


class TestArtifactInvariants:
    def test_table_rows_must_match_columns(self):
        with pytest.raises(ValueError):
            Table(("a", "b"), ((1,),))

    def test_error_category_must_be_known(self):
        with pytest.raises(ValueError):
            ErrorInfo("not-a-category", "boom")

    def test_chart_payload_must_be_json_document(self):
        with pytest.raises(TypeError):
            Artifact("a-1", Kind.CHART_SPEC, "not a dict")

    def test_ids_are_monotonic(self, make):
        a, b = make.text("1"), make.text("2")
        assert a.id != b.id
        assert int(a.id.split("-")[1]) < int(b.id.split("-")[1])

    def test_storage_round_trip(self, make):
        artifacts = [
            make.text("t"),
            make.table(["a", "b"], [(1, "x"), (2, None)]),
            make.image(FileBlob(size=3, data=b"abc"), name="i.png"),
            make.error("timeout", "late"),
            make.chart_spec({"chart_type": "pie"}),
        ]
        for a in artifacts:
            rec = json.loads(json.dumps(to_record(a)))
            assert from_record(rec) == a


class TestIngest:
    def test_csv_happy_path(self):
        t = table_from_csv("a,b\n1,x\n2,y\n")
        assert t.columns == ("a", "b")
        assert t.rows == ((1, "x"), (2, "y"))

    def test_csv_quoted_fields(self):
        t = table_from_csv('a,b\n"1,5","he said ""hi"""\n')
        assert t.rows == (("1,5", 'he said "hi"'),)

    def test_csv_empty_cell_is_null(self):
        t = table_from_csv("a,b\n1,\n")
        assert t.rows == ((1, None),)

    def test_jsonl(self):
        t = table_from_jsonl('{"a": 1, "b": "x"}\n{"a": 2, "c": true}\n')
        assert t.columns == ("a", "b", "c")
        assert t.rows == ((1, "x", None), (2, None, True))

    def test_csv_rejects_ragged_rows(self):
        with pytest.raises(ValueError):
            table_from_csv("a,b\n1\n")
