"""Tokenizer for program sources.

Identifiers are ``[A-Za-z][A-Za-z0-9_]*``, numerals are decimal nonnegative
integers, and ``#`` starts a comment running to end of line.  Newlines are
ordinary whitespace; declarations are keyword-delimited.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .diagnostics import Diagnostic, SourceSpan, error


class TokenKind(enum.Enum):
    IDENT = "identifier"
    INT = "integer"
    LBRACE = "{"
    RBRACE = "}"
    LPAREN = "("
    RPAREN = ")"
    COLON = ":"
    EQUALS = "="
    DOT = "."
    COMMA = ","
    PARPAR = "||"
    EOF = "end of input"
    # keywords
    INTERFACE = "interface"
    ENTITY = "entity"
    ATTRIBUTE = "attribute"
    EVENT = "event"
    ACTION = "action"
    RULES = "rules"
    WHEN = "when"
    TRIGGER = "trigger"
    END = "end"
    FROM = "from"
    WITH = "with"
    VALUE = "value"
    CHANGED = "changed"
    ON = "on"
    AND = "and"
    OR = "or"
    ALL = "all"
    GROUPBY = "groupby"
    TRUE = "true"
    FALSE = "false"


_KEYWORD_KINDS = (
    TokenKind.INTERFACE,
    TokenKind.ENTITY,
    TokenKind.ATTRIBUTE,
    TokenKind.EVENT,
    TokenKind.ACTION,
    TokenKind.RULES,
    TokenKind.WHEN,
    TokenKind.TRIGGER,
    TokenKind.END,
    TokenKind.FROM,
    TokenKind.WITH,
    TokenKind.VALUE,
    TokenKind.CHANGED,
    TokenKind.ON,
    TokenKind.AND,
    TokenKind.OR,
    TokenKind.ALL,
    TokenKind.GROUPBY,
    TokenKind.TRUE,
    TokenKind.FALSE,
)

KEYWORDS = {kind.value: kind for kind in _KEYWORD_KINDS}


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: SourceSpan


_PUNCT = {
    "{": TokenKind.LBRACE,
    "}": TokenKind.RBRACE,
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    ":": TokenKind.COLON,
    "=": TokenKind.EQUALS,
    ".": TokenKind.DOT,
    ",": TokenKind.COMMA,
}


def tokenize(text: str) -> tuple[list[Token], list[Diagnostic]]:
    """Scan ``text`` into tokens; invalid characters become diagnostics.

    Always succeeds: the token list ends with an EOF token and every
    problem is reported rather than raised.
    """
    tokens: list[Token] = []
    diagnostics: list[Diagnostic] = []
    pos = 0
    line = 1
    col = 1

    def span(length: int) -> SourceSpan:
        return SourceSpan(line, col, length)

    while pos < len(text):
        ch = text[pos]
        if ch == "\n":
            pos += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            pos += 1
            col += 1
            continue
        if ch == "#":
            while pos < len(text) and text[pos] != "\n":
                pos += 1
                col += 1
            continue
        if ch.isdigit():
            start = pos
            while pos < len(text) and text[pos].isdigit():
                pos += 1
            word = text[start:pos]
            if pos < len(text) and (text[pos].isalpha() or text[pos] == "_"):
                bad_end = pos
                while bad_end < len(text) and (text[bad_end].isalnum() or text[bad_end] == "_"):
                    bad_end += 1
                bad = text[start:bad_end]
                diagnostics.append(
                    error("parse-error", f"malformed numeral {bad!r}", span(len(bad)))
                )
                col += bad_end - start
                pos = bad_end
                continue
            tokens.append(Token(TokenKind.INT, word, span(len(word))))
            col += len(word)
            continue
        if ch.isalpha():
            start = pos
            while pos < len(text) and (text[pos].isalnum() or text[pos] == "_"):
                pos += 1
            word = text[start:pos]
            kind = KEYWORDS.get(word, TokenKind.IDENT)
            tokens.append(Token(kind, word, span(len(word))))
            col += len(word)
            continue
        if ch == "|" and text[pos : pos + 2] == "||":
            tokens.append(Token(TokenKind.PARPAR, "||", span(2)))
            pos += 2
            col += 2
            continue
        if ch in _PUNCT:
            tokens.append(Token(_PUNCT[ch], ch, span(1)))
            pos += 1
            col += 1
            continue
        diagnostics.append(error("parse-error", f"invalid character {ch!r}", span(1)))
        pos += 1
        col += 1

    tokens.append(Token(TokenKind.EOF, "", SourceSpan(line, col, 0)))
    return tokens, diagnostics
