"""Transcript corpus for parser invariance testing.

Covers clean prose, action blocks (including the canonical tool-call shapes
the agents are prompted to produce), generic code fences, escape sequences,
malformed and unterminated structures, and adversarial delimiter floods.
"""

ACTION = '```json\n{"action": "%s", "action_input": "%s"}\n```'

CHAT_TRANSCRIPTS = [
    "Hello world",
    "",
    "``",
    "just text with `inline code` and *markdown*",
    'Searching now.\n```json\n{"action": "WeBot", "action_input": "find flights"}\n```',
    ACTION % ("Python", "load the csv and plot a histogram"),
    "Let me check the weather for you.\n" + ACTION % ("XWeather", "weather in Paris today"),
    ACTION % ("SQL", "count the rows") + "\nThe answer is 42.",  # trailing text violation
    ACTION % ("KaggleSearch", "titanic datasets") + "\n",
    # escapes inside the input string
    '```json\n{"action": "Python", "action_input": "print(\\"hi\\\\n\\")"}\n```',
    '```json\n{"action": "Shell", "action_input": "tab\\there"}\n```',
    '```json\n{"action": "U", "action_input": "\\u00e9tude"}\n```',
    # key order reversed, extra whitespace, missing input
    '```json\n{\n  "action_input": "query first",\n  "action": "Tool"\n}\n```',
    '```json\n{"action": "NoInput"}\n```',
    '```json\n{"action":"Tight","action_input":"no spaces"}```',
    # generic fences stay text
    "```python\nprint(1)\n```\n",
    "Here:\n```\nplain fence\n```\ndone",
    "```python\na = '```json'\n```\n",  # opener-lookalike inside a generic fence
    "````\nfour ticks\n````\n",
    "``` json\nnot an action (space before label)\n```\n",
    "```jsonp\nnot an action either\n```\n",
    # malformed blocks degrade
    '```json\n{"foo": "bar"}\n```',
    '```json\n{"action": 42}\n```',
    '```json\n{"action": "A", "action": "B"}\n```',
    '```json\n[1, 2, 3]\n```',
    '```json\nnot json at all\n```',
    '```json\n{"action": "A", "action_input": {"nested": true}}\n```',
    # unterminated structures
    '```json\n{"action":',
    '```json\n{"action": "A", "action_input": "never closed',
    "```json",
    "```py",
    "text then\n```\nunterminated fence",
    # two actions in one completion
    ACTION % ("First", "one") + "\n" + ACTION % ("Second", "two"),
    # unicode and long text
    "caf\u00e9 \u2615 \u4f60\u597d\uff01 \U0001f680 emoji stream",
    "line one\nline two\nline three\n" * 5,
    "A" * 400,
    # fence-opener prefix floods
    "`" * 23,
    "``\n" * 8,
    "```json\n" * 2,
    "x```json\nnot at line start so plain text",
]

WEBOT_TRANSCRIPTS = [
    "<Thought>I should click the add to cart button</Thought>\n<Action>click(223)</Action>",
    "<Thought>need to search</Thought>\n<Action>setValue(2, \"New York\")</Action>",
    "<Thought>done now</Thought>\n<Action>finish(\"The cheapest flight is $120\")</Action>",
    "<Action>click(1)</Action>",
    "Sure, working on it.\n<Thought>plan the steps</Thought>\n<Action>click(5)</Action>",
    "<Thought>a < b in math</Thought>\n<Action>click(3)</Action>",
    "<Thought>multi\nline\nthought</Thought>\n<Action>setValue(4, \"a, b, and c\")</Action>",
    "<Action>setValue(7, \"escaped \\\" quote\")</Action>",
    "<Action>finish(\"answer with (parens) inside\")</Action>",
    "<Thing>not a tag</Thing>",
    "<Thought>unterminated thought...",
    "<Action>click(9",
    "<Action>do stuff without parens</Action>",
    "<Action>click(1) extra</Action>\n<Thought>retry</Thought>\n<Action>click(2)</Action>",
    "no tags at all, just prose",
    "   \n\t  ",
    "<Th<Thought>nested open</Thought>",
    "< Thought>space breaks the tag",
    "<<<<<",
    "<Thought></Thought><Action>finish(\"\")</Action>",
    "text <Thought>t</Thought> middle <Action>click(1)</Action> trailing",
]

ALL = [("chat", t) for t in CHAT_TRANSCRIPTS] + [("webot", t) for t in WEBOT_TRANSCRIPTS]
assert len(ALL) >= 50


def random_partition(rng, s, max_cuts=12):
    """Split s into contiguous chunks at random cut points."""
    if len(s) <= 1:
        return [s]
    n_cuts = rng.randint(0, min(max_cuts, len(s) - 1))
    cuts = sorted(rng.sample(range(1, len(s)), n_cuts))
    parts = []
    prev = 0
    for c in cuts + [len(s)]:
        parts.append(s[prev:c])
        prev = c
    return parts
