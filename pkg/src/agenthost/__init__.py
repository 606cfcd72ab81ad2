"""agenthost: a self-hostable runtime for LLM-backed language agents.

Three agent profiles (data analysis, API plugins, web navigation) run behind
a streaming HTTP gateway with deterministic offline test fixtures.
"""

__version__ = "0.1.0"
