from .api import (
    ApiPluginExecutor,
    ApiRunResult,
    Exhausted,
    HttpCallError,
    Trial,
    UnknownEndpoint,
    coerce_input,
    extract_reply_json,
    invoke,
    select_and_fill,
    specs_str,
    validate,
)
from .api import LlmFormatError as ApiLlmFormatError
from .api import run as api_run
from .builtin import DataProfilingTool, EChartsTool, KaggleSearchTool, PythonTool, SqlTool, data_tools
from .charts import SpecInvalid, build_chart, validate_chart_spec
from .code import CodeRunResult, build_and_run_code, extract_code
from .datasets import ClientUnavailable, FixtureSearchClient, HttpSearchClient, dataset_search
from .profiling import profile_data, profile_table
from .sandbox import (
    EXIT_OK,
    KILLED_MEMORY,
    KILLED_OUTPUT,
    KILLED_TIME,
    InterpreterMissing,
    RawExecution,
    SandboxLimits,
    probe_interpreter,
    run_python,
)
from .sql import (
    NonSelectRejected,
    QueryOutcome,
    SqlSyntaxError,
    execute_query,
    extract_sql,
    first_keyword,
    load_table,
    sql_answer,
    table_info,
)

__all__ = [
    "ApiPluginExecutor", "ApiRunResult", "Exhausted", "HttpCallError", "Trial", "UnknownEndpoint",
    "coerce_input", "extract_reply_json", "invoke", "select_and_fill", "specs_str", "validate",
    "ApiLlmFormatError", "api_run",
    "DataProfilingTool", "EChartsTool", "KaggleSearchTool", "PythonTool", "SqlTool", "data_tools",
    "SpecInvalid", "build_chart", "validate_chart_spec",
    "CodeRunResult", "build_and_run_code", "extract_code",
    "ClientUnavailable", "FixtureSearchClient", "HttpSearchClient", "dataset_search",
    "profile_data", "profile_table",
    "EXIT_OK", "KILLED_MEMORY", "KILLED_OUTPUT", "KILLED_TIME",
    "InterpreterMissing", "RawExecution", "SandboxLimits", "probe_interpreter", "run_python",
    "NonSelectRejected", "QueryOutcome", "SqlSyntaxError",
    "execute_query", "extract_sql", "first_keyword", "load_table", "sql_answer", "table_info",
]
