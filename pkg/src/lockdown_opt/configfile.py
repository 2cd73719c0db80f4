"""Flat key-value configuration format with section headers.

One scalar per line, ``key = value`` under ``[section]`` headers, ``#``
comments, UTF-8, UNIX line endings.  Floats are written with ``repr`` so a
write/read round trip is bit-exact.  Group-valued fields use dotted keys,
one entry per group (``gamma.young = 0.1``).
"""

from __future__ import annotations

from pathlib import Path

from .errors import ConfigFormatError

__all__ = ["format_sections", "parse_sections", "write_sections", "read_sections"]

Sections = dict[str, dict[str, str]]


def format_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_sections(sections: Sections) -> str:
    lines: list[str] = []
    for section, entries in sections.items():
        lines.append(f"[{section}]")
        for key, value in entries.items():
            lines.append(f"{key} = {format_value(value)}")
        lines.append("")
    return "\n".join(lines)


def parse_sections(text: str) -> Sections:
    sections: Sections = {}
    current: dict[str, str] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if not name:
                raise ConfigFormatError(f"line {lineno}: empty section header")
            current = sections.setdefault(name, {})
            continue
        if "=" not in line:
            raise ConfigFormatError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if current is None:
            raise ConfigFormatError(f"line {lineno}: key-value pair before any section")
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigFormatError(f"line {lineno}: empty key")
        current[key] = value.strip()
    return sections


def write_sections(sections: Sections, path) -> None:
    Path(path).write_text(format_sections(sections), encoding="utf-8", newline="\n")


def read_sections(path) -> Sections:
    return parse_sections(Path(path).read_text(encoding="utf-8"))
