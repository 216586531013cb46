"""
Text format for sets: ``q=<int>; {e1,e2,...}`` and ``q=<int>; {(x1,y1),...}``.

The modulus prefix may be omitted when the caller supplies q separately,
as the CLI does for ``--q 4 --A "{0,2}"``.
"""
import re
from pathlib import Path
from typing import Optional, Union

from ..core.exceptions import DiffsetError, MalformedLiteral, ModulusOutOfRange
from .ring import build_ctx
from .sets import Subset2D, SubsetZq

_PREFIX = re.compile(r"^\s*q\s*=\s*(\d+)\s*;\s*(.*)$", re.DOTALL)
_BODY = re.compile(r"^\s*\{(.*)\}\s*$", re.DOTALL)
_PAIR = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)")


def parse_literal(text: str, q: Optional[int] = None) -> Union[SubsetZq, Subset2D]:
    """
    Parse a set literal.

    Args:
        text: Literal, with or without the ``q=`` prefix
        q: Modulus to use when the literal has no prefix

    Returns:
        SubsetZq, or Subset2D when the elements are pairs

    Raises:
        MalformedLiteral: On syntax errors or conflicting moduli
    """
    body = text
    prefix = _PREFIX.match(text)
    if prefix:
        literal_q = int(prefix.group(1))
        if q is not None and q != literal_q:
            raise MalformedLiteral(f"Literal modulus {literal_q} conflicts with q={q}")
        q = literal_q
        body = prefix.group(2)
    if q is None:
        raise MalformedLiteral(f"No modulus given for literal '{text}'")

    match = _BODY.match(body)
    if not match:
        raise MalformedLiteral(f"Expected '{{...}}' in literal '{text}'")
    inner = match.group(1).strip()

    try:
        ctx = build_ctx(q)
    except DiffsetError as e:
        raise MalformedLiteral(str(e)) from e

    if "(" in inner:
        pairs = _PAIR.findall(inner)
        leftover = _PAIR.sub("", inner).replace(",", "").strip()
        if leftover:
            raise MalformedLiteral(f"Unexpected text '{leftover}' in literal '{text}'")
        try:
            return Subset2D.of(ctx, ((int(x), int(y)) for x, y in pairs))
        except ModulusOutOfRange as e:
            raise MalformedLiteral(str(e)) from e

    if not inner:
        return SubsetZq.empty(ctx)
    try:
        elements = [int(part) for part in inner.split(",")]
    except ValueError as e:
        raise MalformedLiteral(f"Non-integer element in literal '{text}'") from e
    return SubsetZq.of(ctx, elements)


def format_literal(S: Union[SubsetZq, Subset2D]) -> str:
    """Canonical literal; parse_literal(format_literal(S)) == S"""
    if isinstance(S, Subset2D):
        body = ",".join(f"({x},{y})" for x, y in S)
    else:
        body = ",".join(str(x) for x in S)
    return f"q={S.ctx.q}; {{{body}}}"


def load_fixtures(path: Union[str, Path]) -> list[Union[SubsetZq, Subset2D]]:
    """
    Read one literal per line; blank lines and ``#`` comments are skipped.

    Raises:
        MalformedLiteral: With the offending line number
    """
    sets = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        try:
            sets.append(parse_literal(stripped))
        except MalformedLiteral as e:
            raise MalformedLiteral(f"{path}:{lineno}: {e}") from e
    return sets
