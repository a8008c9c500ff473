"""Algorithm genes and their text notations.

Two notations are accepted:

* compact: ``1.1943·min(c+h)+da+59+A*`` (``*`` may replace ``·``; ``+da`` is
  omitted when depression avoidance is off; the method is ``A*`` or ``Greedy``)
* flags: ``w=1.19,lop=min,da=on,lookahead=59,method=astar[,th=1e-06]``
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace


class Lop(str, enum.Enum):
    MIN = "min"
    MAX = "max"


class Method(str, enum.Enum):
    ASTAR = "astar"
    GREEDY = "greedy"


DEFAULT_TH = 1e-6

# block bounds used to validate user input
W_RANGE = (1.0, 3.0)
LOOKAHEAD_RANGE = (2, 80)


class GeneParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class GeneRangeError(ValueError):
    def __init__(self, block: str, value):
        super().__init__(f"{block}={value} outside its allowed range")
        self.block = block


@dataclass(frozen=True)
class Gene:
    w: float = 1.0
    lop: Lop = Lop.MIN
    da: bool = False
    lookahead: int = 1
    method: Method = Method.ASTAR
    th: float = DEFAULT_TH
    # accepted but never consulted by the search
    b: int = 1
    expendable: bool = False
    backtrack: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lop", Lop(self.lop))
        object.__setattr__(self, "method", Method(self.method))
        if not self.w >= 1.0:
            raise GeneRangeError("w", self.w)
        if int(self.lookahead) != self.lookahead or self.lookahead < 1:
            raise GeneRangeError("lookahead", self.lookahead)
        object.__setattr__(self, "lookahead", int(self.lookahead))
        if not self.th >= 0.0:
            raise GeneRangeError("th", self.th)

    def with_(self, **changes) -> "Gene":
        return replace(self, **changes)

    def notation(self) -> str:
        return format_gene(self)


def check_ranges(gene: Gene) -> Gene:
    lo, hi = W_RANGE
    if not lo <= gene.w <= hi:
        raise GeneRangeError("w", gene.w)
    lo, hi = LOOKAHEAD_RANGE
    if not lo <= gene.lookahead <= hi:
        raise GeneRangeError("lookahead", gene.lookahead)
    return gene


def format_gene(gene: Gene, style: str = "compact") -> str:
    if style == "flags":
        parts = [
            f"w={gene.w!r}",
            f"lop={gene.lop.value}",
            f"da={'on' if gene.da else 'off'}",
            f"lookahead={gene.lookahead}",
            f"method={gene.method.value}",
        ]
        if gene.th != DEFAULT_TH:
            parts.append(f"th={gene.th!r}")
        return ",".join(parts)
    method = "A*" if gene.method is Method.ASTAR else "Greedy"
    da = "+da" if gene.da else ""
    return f"{float(gene.w)!r}·{gene.lop.value}(c+h){da}+{gene.lookahead}+{method}"


_ON = {"on": True, "true": True, "1": True, "yes": True,
       "off": False, "false": False, "0": False, "no": False}
_METHODS = {"astar": Method.ASTAR, "a*": Method.ASTAR,
            "greedy": Method.GREEDY, "gbfs": Method.GREEDY}


def parse_gene(text: str, checked: bool = True) -> Gene:
    """Parse either gene notation; ``checked`` enforces the w/lookahead bounds."""
    stripped = text.strip()
    if "=" in stripped:
        gene = _parse_flags(text)
    else:
        gene = _CompactParser(text).parse()
    return check_ranges(gene) if checked else gene


def _parse_flags(text: str) -> Gene:
    values = {}
    pos = 0
    for item in text.split(","):
        offset = pos + len(item) - len(item.lstrip())
        pos += len(item) + 1
        if not item.strip():
            raise GeneParseError("empty field", offset)
        key, sep, raw = item.strip().partition("=")
        key, raw = key.strip().lower(), raw.strip()
        if not sep or not raw:
            raise GeneParseError(f"expected key=value, got {item.strip()!r}", offset)
        try:
            if key == "w":
                values["w"] = float(raw)
            elif key == "th":
                values["th"] = float(raw)
            elif key == "lookahead":
                values["lookahead"] = int(raw)
            elif key == "lop":
                values["lop"] = Lop(raw.lower())
            elif key == "da":
                values["da"] = _ON[raw.lower()]
            elif key == "method":
                values["method"] = _METHODS[raw.lower()]
            elif key == "b":
                values["b"] = int(raw)
            elif key in ("expendable", "backtrack"):
                values[key] = _ON[raw.lower()]
            else:
                raise GeneParseError(f"unknown block {key!r}", offset)
        except (ValueError, KeyError) as exc:
            if isinstance(exc, GeneParseError):
                raise
            raise GeneParseError(f"bad value {raw!r} for {key}", offset) from None
    for required in ("w", "lop", "lookahead", "method"):
        if required not in values:
            raise GeneParseError(f"missing block {required!r}", len(text))
    return Gene(**values)


class _CompactParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def fail(self, message: str):
        raise GeneParseError(message, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, literal: str):
        self.skip_ws()
        if not self.text.startswith(literal, self.pos):
            self.fail(f"expected {literal!r}")
        self.pos += len(literal)

    def number(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isdigit() or self.text[self.pos] in ".eE"):
            # exponent sign
            if self.text[self.pos] in "eE" and self.pos + 1 < len(self.text) and self.text[self.pos + 1] in "+-":
                self.pos += 1
            self.pos += 1
        if start == self.pos:
            self.fail("expected a number")
        return self.text[start:self.pos]

    def parse(self) -> Gene:
        start = self.pos
        raw_w = self.number()
        try:
            w = float(raw_w)
        except ValueError:
            self.pos = start
            self.fail(f"bad weight {raw_w!r}")
        self.skip_ws()
        if self.text.startswith("·", self.pos) or self.text.startswith("*", self.pos):
            self.pos += 1
        else:
            self.fail("expected '·' or '*' after the weight")
        self.skip_ws()
        lop = None
        for candidate in Lop:
            if self.text.startswith(candidate.value, self.pos):
                lop = candidate
                self.pos += len(candidate.value)
                break
        if lop is None:
            self.fail("expected learning operator 'min' or 'max'")
        self.expect("(")
        self.expect("c")
        self.expect("+")
        self.expect("h")
        self.expect(")")
        self.expect("+")
        self.skip_ws()
        da = False
        if self.text.startswith("da", self.pos):
            da = True
            self.pos += 2
            self.expect("+")
            self.skip_ws()
        la_start = self.pos
        raw_la = self.number()
        if not raw_la.isdigit():
            self.pos = la_start
            self.fail(f"lookahead must be an integer, got {raw_la!r}")
        self.expect("+")
        self.skip_ws()
        rest = self.text[self.pos:].strip()
        method = _METHODS.get(rest.lower().replace("^{*}", "*"))
        if method is None:
            self.fail(f"unknown lookahead method {rest!r}")
        w_ok = math.isfinite(w)
        if not w_ok:
            raise GeneParseError("weight must be finite", start)
        return Gene(w=w, lop=lop, da=da, lookahead=int(raw_la), method=method)
