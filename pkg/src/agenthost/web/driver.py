"""Browser drivers: the abstract contract and the deterministic simulator.

The production adapter (a remote-debugger bridge speaking JSON over a local
socket: navigate / query-dom / dispatch-click(id-path) / set-value(id-path,
text)) conforms to the same three-method contract; CI runs the simulator
only.

Simulator site corpus (versioned fixture schema, one directory per site):
  index.json            {"version": 1, "start": "<page id>"}
  <page id>.json        {"url", "title", "body": [elements...],
                         "transitions": {"click:<key>": "<page id>"},
                         "options_on_setvalue": {"<input key>": ["opt", ...]},
                         "fail_first": {"click:<key>": "<reason>"}}

Element nodes: {"tag", "key", "text"|"label", "value", "visible"}.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from pathlib import Path

from .. import errors
from ..errors import PlatformError
from .dom import PageSnapshot, process_dom

DEFAULT_HTML_BUDGET = 4000


class DriverError(PlatformError):
    category = errors.NAVIGATION


class NavigationError(DriverError):
    category = errors.NAVIGATION


class StaleElement(DriverError):
    category = errors.STALE_ELEMENT


@dataclass(frozen=True)
class WebAction:
    """The action vocabulary: click(id), setValue(id, text), finish(answer)."""

    kind: str  # "click" | "setValue" | "finish"
    element_id: int | None = None
    text: str = ""

    def render(self) -> str:
        if self.kind == "click":
            return f"click({self.element_id})"
        if self.kind == "setValue":
            return f'setValue({self.element_id}, "{self.text}")'
        return f'finish("{self.text}")'


class BrowserDriver:
    def navigate(self, url: str) -> None:
        raise NotImplementedError

    def snapshot(self) -> PageSnapshot:
        raise NotImplementedError

    def perform(self, action: WebAction) -> None:
        raise NotImplementedError


class SimulatorDriver(BrowserDriver):
    """Scripted site playback with real staleness and dropdown semantics."""

    def __init__(self, corpus_dir: str | Path, html_budget: int = DEFAULT_HTML_BUDGET):
        root = Path(corpus_dir)
        index = json.loads((root / "index.json").read_text())
        if index.get("version") != 1:
            raise NavigationError(f"unsupported site corpus version {index.get('version')!r}")
        self.pages = {
            p.stem: json.loads(p.read_text()) for p in sorted(root.glob("*.json")) if p.stem != "index"
        }
        self.start_page = index["start"]
        self.html_budget = html_budget
        self._page_id: str | None = None
        self._page: dict | None = None
        self._seq = 0
        self._snapshot: PageSnapshot | None = None
        self._snapshot_seq = -1
        self._failed_once: set[str] = set()
        self._popup_for: str | None = None  # input key whose options are showing
        self.option_rule_violations: list[str] = []
        self.submitted: dict[str, dict] = {}  # page id -> input values at submit time

    # -- internal state helpers ----------------------------------------------

    def _load(self, page_id: str) -> None:
        self._page_id = page_id
        self._page = copy.deepcopy(self.pages[page_id])
        self._seq += 1
        self._popup_for = None

    def _current_values(self) -> dict:
        values = {}
        for node in self._page.get("body", []):
            if node.get("key") and "value" in node:
                values[node["key"]] = node["value"]
        return values

    def _node_by_key(self, key: str) -> dict | None:
        for node in self._page.get("body", []):
            if node.get("key") == key:
                return node
        return None

    # -- driver contract -------------------------------------------------------

    def navigate(self, url: str) -> None:
        for page_id, page in self.pages.items():
            if page.get("url") == url:
                self._load(page_id)
                return
        if url in self.pages:
            self._load(url)
            return
        raise NavigationError(f"no page with url {url!r} in the site corpus")

    def ensure_started(self) -> None:
        if self._page is None:
            self._load(self.start_page)

    def snapshot(self) -> PageSnapshot:
        self.ensure_started()
        snap = process_dom(self._page, self.html_budget, seq=self._seq)
        self._snapshot = snap
        self._snapshot_seq = self._seq
        return snap

    def perform(self, action: WebAction) -> None:
        self.ensure_started()
        if action.kind == "finish":
            return
        if self._snapshot is None or self._snapshot_seq != self._seq:
            raise StaleElement("the page changed since the last snapshot; take a new snapshot")
        element = self._snapshot.element(action.element_id or 0)
        if element is None:
            raise StaleElement(f"no element with id {action.element_id} on the current page")
        node = self._node_by_key(element.key)
        if node is None:
            raise StaleElement(f"element {action.element_id} vanished from the page")

        # dropdown rule: after options pop out, anything but clicking one is a violation
        if self._popup_for is not None and not (action.kind == "click" and element.tag == "option"):
            self.option_rule_violations.append(action.render())

        fail_key = f"{action.kind.lower()}:{element.key}"
        fails = self._page.get("fail_first", {})
        if fail_key in fails and fail_key not in self._failed_once:
            self._failed_once.add(fail_key)
            raise DriverError(str(fails[fail_key]))

        if action.kind == "setValue":
            if element.tag not in ("input", "textarea", "select"):
                raise DriverError(f"element {action.element_id} ({element.tag}) does not accept a value")
            node["value"] = action.text
            options = self._page.get("options_on_setvalue", {}).get(element.key)
            if options:
                self._open_popup(element.key, options)
            return

        # click
        if element.tag == "option" and element.key.startswith("__option:"):
            self._choose_option(element)
            return
        transitions = self._page.get("transitions", {})
        target = transitions.get(f"click:{element.key}")
        if target is not None:
            self.submitted[self._page_id] = self._current_values()
            self._load(target)
        else:
            node["clicked"] = True

    # -- dropdown simulation -----------------------------------------------------

    def _open_popup(self, input_key: str, options: list[str]) -> None:
        self._popup_for = input_key
        body = self._page["body"]
        anchor = next(i for i, n in enumerate(body) if n.get("key") == input_key)
        popup = [
            {"tag": "option", "key": f"__option:{input_key}:{i}", "text": opt}
            for i, opt in enumerate(options)
        ]
        self._page["body"] = body[: anchor + 1] + popup + body[anchor + 1 :]
        self._seq += 1  # the page changed; old ids are stale

    def _choose_option(self, element) -> None:
        _, input_key, _ = element.key.split(":", 2)
        node = self._node_by_key(input_key)
        if node is not None:
            node["value"] = element.visible_text
        self._page["body"] = [
            n for n in self._page["body"] if not str(n.get("key", "")).startswith("__option:")
        ]
        self._popup_for = None
        self._seq += 1
