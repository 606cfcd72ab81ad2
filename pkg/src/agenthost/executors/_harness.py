"""Child-process harness: applies resource limits, then runs the user code.

Invoked as `python -I _harness.py <code-file>` with limits passed through
AGENTHOST_* environment variables. Runs inside the sandboxed child only.
"""

import os
import resource
import sys


def _deny_network():
    import socket

    def _refused(*args, **kwargs):
        raise PermissionError("network access is denied in this sandbox")

    socket.socket = _refused  # type: ignore[assignment]
    socket.create_connection = _refused  # type: ignore[assignment]
    socket.getaddrinfo = _refused  # type: ignore[assignment]


def main():
    memory = int(os.environ.get("AGENTHOST_MEMORY_BYTES", "0"))
    if memory > 0:
        resource.setrlimit(resource.RLIMIT_AS, (memory, memory))
    fsize = int(os.environ.get("AGENTHOST_FSIZE_BYTES", str(256 * 1024 * 1024)))
    resource.setrlimit(resource.RLIMIT_FSIZE, (fsize, fsize))
    if os.environ.get("AGENTHOST_NETWORK", "denied") == "denied":
        _deny_network()

    code_path = sys.argv[1]
    with open(code_path, encoding="utf-8") as f:
        source = f.read()
    globs = {"__name__": "__main__", "__file__": code_path, "__builtins__": __builtins__}
    exec(compile(source, code_path, "exec"), globs)


if __name__ == "__main__":
    main()
