"""Tool-embedded code generation and sandboxed execution.

The chat agent passes a natural-language request; a dedicated model call
writes the code (keeping the chat agent itself free of code generation),
and the sandbox runs it with the session workspace mounted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from ..datamodel import Artifact, ArtifactFactory, FileBlob, linearize, table_from_csv
from ..llm import ChatMessage, CompletionRequest, LlmClient
from .sandbox import RawExecution, SandboxLimits, run_python

CODEGEN_PROMPT = """You are a senior Python engineer. Write a complete, self-contained Python \
script that fulfils the request below.

Rules:
- Read input files from the directory given by the AGENTHOST_INPUTS environment variable.
- Write any produced files (plots, tables, exports) into the current working directory.
- Print human-readable results to stdout.
- No network access is available.
- Reply with exactly one fenced code block: ```python ... ```

Available input files:
{previews}

Request:
{request}
"""

_CODE_FENCE_RE = re.compile(r"```(?:python|py)?\s*\n(.*?)```", re.S)

IMAGE_SUFFIXES = {".png": "image/png", ".jpg": "image/jpeg", ".jpeg": "image/jpeg", ".gif": "image/gif"}


@dataclass
class CodeRunResult:
    code: str
    execution: RawExecution
    produced: tuple[Artifact, ...]


def extract_code(reply: str) -> str:
    m = _CODE_FENCE_RE.search(reply)
    return (m.group(1) if m else reply).strip()


def grounding_previews(grounding, artifact_budget: int = 600) -> str:
    if grounding is None or not len(grounding):
        return "(none)"
    lines = []
    for name, artifact in grounding.items():
        lines.append(f"- {name}:\n{linearize(artifact, artifact_budget)}")
    return "\n".join(lines)


def _wrap_new_file(path: Path, factory: ArtifactFactory) -> Artifact:
    suffix = path.suffix.lower()
    size = path.stat().st_size
    blob = FileBlob(size=size, path=str(path))
    if suffix in IMAGE_SUFFIXES:
        return factory.image(blob, name=path.name, mime=IMAGE_SUFFIXES[suffix])
    if suffix == ".csv":
        try:
            table = table_from_csv(path.read_text(encoding="utf-8"))
            return factory.table(table.columns, table.rows, name=path.name)
        except (ValueError, UnicodeDecodeError):
            pass
    return factory.file_ref(blob, name=path.name)


def build_and_run_code(
    nl_query: str,
    llm: LlmClient,
    limits: SandboxLimits,
    factory: ArtifactFactory,
    workspace: str | Path,
    grounding=None,
    profile: str = "",
) -> CodeRunResult:
    """Generate code for the request, run it sandboxed, wrap produced files."""
    workspace = Path(workspace)
    inputs_dir = workspace / "inputs"
    outputs_dir = workspace / "outputs"
    inputs_dir.mkdir(parents=True, exist_ok=True)
    outputs_dir.mkdir(parents=True, exist_ok=True)

    prompt = CODEGEN_PROMPT.format(previews=grounding_previews(grounding), request=nl_query)
    reply = llm.complete(
        CompletionRequest(messages=[ChatMessage("user", prompt)], stream=False, profile=profile)
    )
    code = extract_code(reply)

    before = {p.name for p in outputs_dir.iterdir()}
    execution = run_python(code, limits, outputs_dir, inputs_dir)
    produced = tuple(
        _wrap_new_file(p, factory)
        for p in sorted(outputs_dir.iterdir())
        if p.name not in before and not p.name.startswith(".")
    )
    return CodeRunResult(code, execution, produced)
