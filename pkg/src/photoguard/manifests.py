"""App manifest permission analysis.

Flags apps that request both external-storage read and network access:
that pair is what makes silent photo exfiltration possible, so its
prevalence across a corpus is the headline statistic.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import quoteattr

ANDROID_NS = "http://schemas.android.com/apk/res/android"
READ_EXTERNAL_STORAGE = "android.permission.READ_EXTERNAL_STORAGE"
INTERNET = "android.permission.INTERNET"


class ManifestParseError(Exception):
    """Malformed manifest XML; carries the parser's line/column when known."""

    def __init__(self, detail: str, line: int | None = None, column: int | None = None):
        position = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{detail}{position}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class ManifestDoc:
    app_id: str
    permissions: frozenset[str]

    def to_xml(self) -> str:
        """Minimal manifest XML that reparses to an equal document."""
        lines = [
            f'<manifest xmlns:android="{ANDROID_NS}" package={quoteattr(self.app_id)}>',
        ]
        for permission in sorted(self.permissions):
            lines.append(f"  <uses-permission android:name={quoteattr(permission)} />")
        lines.append("</manifest>")
        return "\n".join(lines)


def parse_manifest(text: str) -> ManifestDoc:
    """Extract (package, requested permission set) from manifest XML.

    The android: prefix on the name attribute is accepted whether or not
    the document declares the namespace. Declarations anywhere else in the
    tree are ignored; duplicates collapse (set semantics).
    """
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        if "unbound prefix" in str(exc):
            root = _reparse_with_android_ns(text, exc)
        else:
            line, column = exc.position if exc.position else (None, None)
            raise ManifestParseError(f"malformed XML: {exc.msg.split(':')[0]}", line, column) from exc

    tag = root.tag.rsplit("}", 1)[-1]
    if tag != "manifest":
        raise ManifestParseError(f"root element must be <manifest>, got <{tag}>")
    app_id = root.get("package")
    if not app_id:
        raise ManifestParseError("manifest element is missing the package attribute")

    permissions = set()
    for element in root.iter():
        if element.tag.rsplit("}", 1)[-1] != "uses-permission":
            continue
        name = element.get(f"{{{ANDROID_NS}}}name") or element.get("android:name") or element.get("name")
        if name:
            permissions.add(name)
    return ManifestDoc(app_id=app_id, permissions=frozenset(permissions))


def _reparse_with_android_ns(text: str, original: ET.ParseError) -> ET.Element:
    # Documents in the wild use android:name without declaring the prefix;
    # inject the declaration on the root and retry once.
    patched, n = re.subn(r"<manifest\b", f'<manifest xmlns:android="{ANDROID_NS}"', text, count=1)
    if n == 0:
        line, column = original.position if original.position else (None, None)
        raise ManifestParseError("malformed XML: unbound prefix", line, column) from original
    try:
        return ET.fromstring(patched)
    except ET.ParseError as exc:
        line, column = exc.position if exc.position else (None, None)
        raise ManifestParseError(f"malformed XML: {exc.msg.split(':')[0]}", line, column) from exc


def flags_photo_leak_risk(doc: ManifestDoc) -> bool:
    """True iff the app requests both storage read and network access."""
    return READ_EXTERNAL_STORAGE in doc.permissions and INTERNET in doc.permissions


@dataclass
class CorpusReport:
    total_apps: int = 0
    risky_apps: int = 0
    risky_ids: list[str] = field(default_factory=list)
    proportion: float | None = None  # None when the corpus is empty
    apps: list[tuple[str, bool]] = field(default_factory=list)  # (app_id, risky)
    unparsable: list[tuple[str, str]] = field(default_factory=list)  # (file, error)


def analyze_corpus(directory: str | Path) -> CorpusReport:
    """Aggregate the leak-risk flag over a directory of manifest files.

    Unparsable files are itemized and excluded from the totals, keeping
    the proportion well-defined over the files that actually parsed.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"manifest directory not found: {directory}")
    report = CorpusReport()
    for file in sorted(directory.iterdir()):
        if not file.is_file():
            continue
        try:
            doc = parse_manifest(file.read_text(encoding="utf-8"))
        except (ManifestParseError, UnicodeDecodeError, OSError) as exc:
            report.unparsable.append((str(file), str(exc)))
            continue
        risky = flags_photo_leak_risk(doc)
        report.apps.append((doc.app_id, risky))
        report.total_apps += 1
        if risky:
            report.risky_apps += 1
            report.risky_ids.append(doc.app_id)
    report.risky_ids.sort()
    report.apps.sort()
    if report.total_apps > 0:
        report.proportion = report.risky_apps / report.total_apps
    return report
