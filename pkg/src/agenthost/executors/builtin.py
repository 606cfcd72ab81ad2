"""Data-agent tools: chat-facing adapters over the executor operations."""

from __future__ import annotations

import sqlite3

from .. import errors
from ..agents.types import OBS_OK, OBS_TOOL_ERROR, Observation, ToolContext
from ..datamodel import Kind
from .charts import build_chart
from .code import build_and_run_code
from .datasets import dataset_search
from .profiling import profile_data
from .sandbox import SandboxLimits
from .sql import load_table, sql_answer


def _resolve_table(action_input: str, ctx: ToolContext):
    """Pick the grounding table the request refers to: exact name mention wins,
    a sole table is implicit, anything else is an error."""
    if ctx.grounding is None or not len(ctx.grounding):
        return None, "no uploaded files are available; upload a table first"
    tables = [(name, a) for name, a in ctx.grounding.items() if a.kind == Kind.TABLE]
    if not tables:
        return None, "no table files are available in this session"
    for name, artifact in tables:
        if name in action_input:
            return artifact, None
    if len(tables) == 1:
        return tables[0][1], None
    names = ", ".join(name for name, _ in tables)
    return None, f"request does not name one of the available tables: {names}"


class PythonTool:
    name = "Python"
    description = "Generate and execute Python code for data loading, transformation, analysis, and file outputs."

    def __init__(self, limits: SandboxLimits | None = None):
        self.limits = limits or SandboxLimits()

    def run(self, action_input: str, ctx: ToolContext) -> Observation:
        result = build_and_run_code(
            action_input,
            ctx.llm,
            ctx.extras.get("sandbox_limits", self.limits),
            ctx.factory,
            ctx.workspace,
            grounding=ctx.grounding,
            profile=ctx.profile,
        )
        artifacts = [ctx.factory.code(result.code, lang="python", name="generated code")]
        console = result.execution.stdout
        if result.execution.stderr:
            console += ("\n" if console else "") + result.execution.stderr
        artifacts.append(ctx.factory.console(console or "(no output)"))
        artifacts.extend(result.produced)
        if result.execution.ok:
            return Observation(tuple(artifacts), OBS_OK)
        exit_kind = result.execution.exit
        category = {
            "killed:time_limit": errors.TIME_LIMIT,
            "killed:memory_limit": errors.MEMORY_LIMIT,
            "killed:output_limit": errors.OUTPUT_LIMIT,
        }.get(exit_kind, errors.TOOL_ERROR)
        artifacts.append(ctx.factory.error(category, f"execution ended with {exit_kind}"))
        return Observation(tuple(artifacts), OBS_TOOL_ERROR)


class SqlTool:
    name = "SQL"
    description = "Answer questions about uploaded tables and databases by writing and executing SQL queries."

    def run(self, action_input: str, ctx: ToolContext) -> Observation:
        conn = ctx.extras.get("sql_conn")
        if conn is None:
            conn = sqlite3.connect(":memory:")
            ctx.extras["sql_conn"] = conn
            if ctx.grounding is not None:
                for name, artifact in ctx.grounding.items():
                    if artifact.kind == Kind.TABLE:
                        load_table(conn, name.rsplit(".", 1)[0], artifact.payload)
        result = sql_answer(action_input, conn, ctx.llm, profile=ctx.profile)
        outcome = result["outcome"]
        return Observation(
            (
                ctx.factory.code(result["sql"], lang="sql", name="SQLQuery"),
                ctx.factory.table(outcome.columns, outcome.rows, name="SQLResult"),
                ctx.factory.text(result["answer"], name="Answer"),
            ),
            OBS_OK,
        )


class DataProfilingTool:
    name = "DataProfiling"
    description = "Heuristic profiling of an uploaded table: column types, null counts, distinct counts, ranges."

    def run(self, action_input: str, ctx: ToolContext) -> Observation:
        table, problem = _resolve_table(action_input, ctx)
        if problem:
            return Observation((ctx.factory.error(errors.TOOL_ERROR, problem),), OBS_TOOL_ERROR)
        return Observation((profile_data(table, ctx.factory),), OBS_OK)


class EChartsTool:
    name = "ECharts"
    description = "Build an interactive chart specification (bar, line, pie, scatter) from an uploaded table."

    def run(self, action_input: str, ctx: ToolContext) -> Observation:
        table, problem = _resolve_table(action_input, ctx)
        if problem:
            return Observation((ctx.factory.error(errors.TOOL_ERROR, problem),), OBS_TOOL_ERROR)
        artifact = build_chart(action_input, table, ctx.llm, ctx.factory, profile=ctx.profile)
        return Observation((artifact,), OBS_OK)


class KaggleSearchTool:
    name = "KaggleSearch"
    description = "Search public datasets by keyword and return matching dataset cards."

    def run(self, action_input: str, ctx: ToolContext) -> Observation:
        client = ctx.extras.get("search_client")
        if client is None:
            return Observation(
                (ctx.factory.error(errors.CLIENT_UNAVAILABLE, "no dataset search client configured"),),
                OBS_TOOL_ERROR,
            )
        cards = dataset_search(action_input, client, ctx.factory)
        if not cards:
            return Observation((ctx.factory.text("No datasets found."),), OBS_OK)
        return Observation(tuple(cards), OBS_OK)


def data_tools(limits: SandboxLimits | None = None) -> dict:
    tools = [PythonTool(limits), SqlTool(), DataProfilingTool(), EChartsTool(), KaggleSearchTool()]
    return {t.name: t for t in tools}
