"""Textual ``.tm`` format: lexer, parser and canonical serializer."""

from ..diagnostics import SourceSpan
from .document import ModelDocument
from .lexer import KEYWORDS, tokenize
from .parser import parse, parse_file, parse_with_diagnostics
from .serializer import serialize

__all__ = ["KEYWORDS", "ModelDocument", "SourceSpan", "parse", "parse_file",
           "parse_with_diagnostics", "serialize", "tokenize"]
