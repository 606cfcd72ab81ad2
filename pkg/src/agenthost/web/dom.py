"""Numbered-element page snapshots.

Interactable elements get fresh 1-based ids per snapshot in document order;
the processed text rendering inlines those ids so the model can refer to
them. Ids are never stable across snapshots by design.
"""

from __future__ import annotations

from dataclasses import dataclass

ELISION = "… (page content truncated)"

INTERACTABLE_TAGS = frozenset({"a", "button", "input", "select", "option", "textarea"})


@dataclass(frozen=True)
class PageElement:
    id: int
    tag: str
    visible_text: str
    input_value: str = ""
    role_hint: str = ""
    key: str = ""  # stable fixture key; internal to the driver


@dataclass(frozen=True)
class PageSnapshot:
    url: str
    title: str
    elements: tuple[PageElement, ...]
    processed_html: str
    seq: int = 0

    def element(self, element_id: int) -> PageElement | None:
        for el in self.elements:
            if el.id == element_id:
                return el
        return None


_ROLE_HINTS = {
    "a": "link",
    "button": "button",
    "input": "textbox",
    "textarea": "textbox",
    "select": "combobox",
    "option": "option",
}


def _render_node(node: dict, element: PageElement | None) -> str:
    tag = node.get("tag", "div")
    text = node.get("text", "") or node.get("label", "")
    if element is None:
        return text
    value = f' value="{element.input_value}"' if element.tag in ("input", "textarea", "select") else ""
    return f"<{element.tag} id={element.id}{value}>{text}</{element.tag}>"


def process_dom(raw: dict, budget: int, seq: int = 0) -> PageSnapshot:
    """Deterministic extraction: allow-listed visible tags become elements,
    everything else is flattened text; output capped at budget."""
    elements: list[PageElement] = []
    lines: list[str] = []
    next_id = 1
    for node in raw.get("body", []):
        tag = node.get("tag", "div")
        visible = node.get("visible", True)
        element = None
        if visible and tag in INTERACTABLE_TAGS:
            element = PageElement(
                id=next_id,
                tag=tag,
                visible_text=node.get("text", "") or node.get("label", ""),
                input_value=str(node.get("value", "") or ""),
                role_hint=_ROLE_HINTS.get(tag, ""),
                key=node.get("key", f"auto-{next_id}"),
            )
            elements.append(element)
            next_id += 1
        if visible:
            lines.append(_render_node(node, element))
    text = "\n".join(line for line in lines if line)
    if len(text) > budget:
        keep = max(0, budget - len(ELISION) - 1)
        text = text[:keep] + "\n" + ELISION if keep else ELISION[:budget]
    return PageSnapshot(
        url=raw.get("url", ""),
        title=raw.get("title", ""),
        elements=tuple(elements),
        processed_html=text,
        seq=seq,
    )
