"""SQL question answering over an embedded SQLite engine.

The model writes the query (SQLQuery: line), the engine executes it
read-only, and a second model continuation produces the Answer: text with
the SQLResult in context.
"""

from __future__ import annotations

import re
import sqlite3
import time
from dataclasses import dataclass
from typing import Any

from .. import errors
from ..agents.catalog import render_prompt
from ..datamodel import Table
from ..errors import PlatformError
from ..llm import ChatMessage, CompletionRequest, LlmClient

ROW_CAP = 50


class SqlSyntaxError(PlatformError):
    category = errors.SQL_SYNTAX


class NonSelectRejected(PlatformError):
    category = errors.NON_SELECT_REJECTED


class LlmFormatError(PlatformError):
    category = errors.LLM_FORMAT


@dataclass(frozen=True)
class QueryOutcome:
    columns: tuple[str, ...]
    rows: tuple[tuple[Any, ...], ...]
    total_rows: int
    elapsed_s: float

    def __post_init__(self):
        if len(self.rows) > ROW_CAP:
            raise ValueError("rows exceed the row cap")
        if self.total_rows < len(self.rows):
            raise ValueError("total_rows below returned rows")


_LABELS = ("SQLResult:", "Answer:", "Question:")


def extract_sql(reply: str) -> str:
    """The text after 'SQLQuery:' up to end-of-line or the next labeled field."""
    idx = reply.find("SQLQuery:")
    if idx < 0:
        raise LlmFormatError(f"no SQLQuery line in reply: {reply[:200]!r}")
    rest = reply[idx + len("SQLQuery:") :]
    line = rest.split("\n", 1)[0]
    for label in _LABELS:
        cut = line.find(label)
        if cut >= 0:
            line = line[:cut]
    sql = line.strip()
    if len(sql) >= 2 and sql[0] == '"' and sql[-1] == '"':
        sql = sql[1:-1]
    if not sql:
        raise LlmFormatError("empty SQLQuery line")
    return sql


_COMMENT_RE = re.compile(r"(--[^\n]*\n?)|(/\*.*?\*/)", re.S)


def first_keyword(sql: str) -> str:
    stripped = _COMMENT_RE.sub(" ", sql).strip()
    m = re.match(r"([A-Za-z]+)", stripped)
    return m.group(1).upper() if m else ""


def guard_read_only(sql: str) -> None:
    kw = first_keyword(sql)
    if kw not in ("SELECT", "WITH"):
        raise NonSelectRejected(f"only SELECT/WITH statements are allowed, got {kw or 'nothing'}")


def open_read_only(conn: sqlite3.Connection) -> sqlite3.Connection:
    conn.execute("PRAGMA query_only = ON")
    return conn


def load_table(conn: sqlite3.Connection, name: str, table: Table) -> None:
    """Materialize a Table artifact payload as a SQLite table."""
    cols = ", ".join(f'"{c}"' for c in table.columns)
    conn.execute(f'CREATE TABLE IF NOT EXISTS "{name}" ({cols})')
    placeholders = ", ".join("?" for _ in table.columns)
    conn.executemany(f'INSERT INTO "{name}" VALUES ({placeholders})', [tuple(r) for r in table.rows])
    conn.commit()


def table_info(conn: sqlite3.Connection) -> str:
    """Schema text for the prompt: one line per table with typed columns."""
    lines = []
    tables = conn.execute(
        "SELECT name FROM sqlite_master WHERE type='table' AND name NOT LIKE 'sqlite_%' ORDER BY name"
    ).fetchall()
    for (name,) in tables:
        cols = conn.execute(f'PRAGMA table_info("{name}")').fetchall()
        col_text = ", ".join(f"{c[1]} {c[2] or 'TEXT'}".strip() for c in cols)
        lines.append(f'"{name}" ({col_text})')
    return "\n".join(lines)


def execute_query(conn: sqlite3.Connection, sql: str, row_cap: int = ROW_CAP) -> QueryOutcome:
    guard_read_only(sql)
    start = time.monotonic()
    try:
        cursor = conn.execute(sql)
        rows = cursor.fetchall()
    except sqlite3.Error as e:
        raise SqlSyntaxError(str(e)) from e
    elapsed = time.monotonic() - start
    columns = tuple(d[0] for d in cursor.description or ())
    return QueryOutcome(columns, tuple(tuple(r) for r in rows[:row_cap]), len(rows), elapsed)


def outcome_text(outcome: QueryOutcome) -> str:
    header = " | ".join(outcome.columns)
    lines = [header] + [" | ".join(str(c) for c in row) for row in outcome.rows]
    if outcome.total_rows > len(outcome.rows):
        lines.append(f"… ({outcome.total_rows} rows total)")
    return "\n".join(lines)


def sql_answer(
    question: str,
    conn: sqlite3.Connection,
    llm: LlmClient,
    dialect: str = "sqlite",
    chat_history: str = "",
    profile: str = "",
) -> dict:
    """Full chain: prompt -> SQLQuery -> read-only execution -> Answer continuation."""
    open_read_only(conn)
    prompt = render_prompt(
        "sql_prompt",
        chat_history=chat_history,
        dialect=dialect,
        table_info=table_info(conn),
        question=question,
    )
    reply = llm.complete(CompletionRequest(messages=[ChatMessage("user", prompt)], stream=False, profile=profile))
    sql = extract_sql(reply)
    outcome = execute_query(conn, sql)
    result_line = f'SQLResult: "{outcome_text(outcome)}"'
    answer_reply = llm.complete(
        CompletionRequest(
            messages=[
                ChatMessage("user", prompt),
                ChatMessage("assistant", reply),
                ChatMessage("user", result_line + "\nAnswer:"),
            ],
            stream=False,
            profile=profile,
        )
    )
    answer = answer_reply.strip()
    if answer.startswith("Answer:"):
        answer = answer[len("Answer:") :].strip()
    return {"sql": sql, "outcome": outcome, "answer": answer}
