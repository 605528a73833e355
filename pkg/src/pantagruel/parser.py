"""Recursive-descent parser producing a :class:`ProgramAst`.

Parsing is total: any input yields either an AST or a :class:`ParseError`
carrying one diagnostic per problem found.  The parser recovers at
declaration boundaries so several errors can be reported in one pass.

Shape decisions: ``and`` binds tighter than ``or`` and ``,`` binds tighter
than ``||``, all left-associative; the ``entity`` keyword is optional (bare
``name:Interface { ... }`` is accepted); entity initializers accept ``:``
or ``=``; ``all ... groupby`` aggregation is parsed into an
:class:`Aggregate` wrapper that later stages reject.
"""

from __future__ import annotations

from .ast import (
    ActionCall,
    ActionExpr,
    ActionPar,
    ActionSeq,
    Aggregate,
    BoolLit,
    BoolTest,
    Decl,
    DeclBare,
    DeclTyped,
    EntityDecl,
    EventAnd,
    EventAtom,
    EventExpr,
    EventOr,
    Expr,
    Filter,
    InitDecl,
    InterfaceDecl,
    Literal,
    MemberDecl,
    NumLit,
    Path,
    ProgramAst,
    RuleAst,
    SpecAst,
    TypeTag,
    ValueChanged,
    ValueEq,
)
from typing import NoReturn

from .diagnostics import Diagnostic, error
from .lexer import Token, TokenKind, tokenize

_TYPE_NAMES = {"Integer": TypeTag.NAT, "Boolean": TypeTag.BOOL}
_MEMBER_KINDS = (TokenKind.ATTRIBUTE, TokenKind.EVENT, TokenKind.ACTION)
_SPEC_SYNC = (TokenKind.INTERFACE, TokenKind.ENTITY, TokenKind.RULES, TokenKind.EOF)
_RULE_SYNC = (TokenKind.WHEN, TokenKind.LPAREN, TokenKind.END, TokenKind.EOF)


class ParseError(Exception):
    """Raised when a source text contains syntax errors."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(d.message for d in diagnostics))


class _Bail(Exception):
    """Internal signal: abandon the current declaration and resynchronize."""


class _Parser:
    def __init__(self, tokens: list[Token], diagnostics: list[Diagnostic]):
        self.tokens = tokens
        self.pos = 0
        self.diagnostics = diagnostics

    # ── token access ─────────────────────────────────────────────

    def _current(self) -> Token:
        return self.tokens[self.pos]

    def _at(self, *kinds: TokenKind) -> bool:
        return self._current().kind in kinds

    def _peek(self, offset: int) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def _advance(self) -> Token:
        tok = self._current()
        if tok.kind is not TokenKind.EOF:
            self.pos += 1
        return tok

    def _error(self, message: str, token: Token | None = None) -> None:
        tok = token or self._current()
        self.diagnostics.append(error("parse-error", message, tok.span))

    def _fail(self, message: str) -> NoReturn:
        self._error(message)
        raise _Bail()

    def _expect(self, kind: TokenKind, what: str) -> Token:
        if self._at(kind):
            return self._advance()
        tok = self._current()
        got = tok.text or str(tok.kind.value)
        self._fail(f"expected {what}, got {got!r}")

    def _sync(self, kinds: tuple[TokenKind, ...]) -> None:
        while not self._at(*kinds):
            self._advance()

    # ── program ──────────────────────────────────────────────────

    def parse_program(self) -> ProgramAst:
        interfaces: list[InterfaceDecl] = []
        entities: list[EntityDecl] = []
        while not self._at(TokenKind.RULES, TokenKind.EOF):
            try:
                if self._at(TokenKind.INTERFACE):
                    interfaces.append(self._interface_decl())
                elif self._at(TokenKind.ENTITY):
                    self._advance()
                    entities.append(self._entity_decl())
                elif self._at(TokenKind.IDENT) and self._peek(1).kind is TokenKind.COLON:
                    entities.append(self._entity_decl())
                else:
                    self._fail("expected an interface, entity, or rules block")
            except _Bail:
                self._sync(_SPEC_SYNC)
        rules = self._rule_block()
        if not self._at(TokenKind.EOF):
            self._error("unexpected text after the rules block")
        return ProgramAst(SpecAst(tuple(interfaces), tuple(entities)), tuple(rules))

    # ── specification layer ──────────────────────────────────────

    def _interface_decl(self) -> InterfaceDecl:
        start = self._expect(TokenKind.INTERFACE, "'interface'")
        name = self._expect(TokenKind.IDENT, "interface name")
        self._expect(TokenKind.LBRACE, "'{'")
        attributes: list[MemberDecl] = []
        events: list[MemberDecl] = []
        actions: list[MemberDecl] = []
        while self._at(*_MEMBER_KINDS):
            keyword = self._advance()
            member = self._expect(TokenKind.IDENT, "member name")
            if keyword.kind is TokenKind.ACTION:
                self._expect(TokenKind.LPAREN, "'('")
                ty = self._type_name()
                self._expect(TokenKind.RPAREN, "')'")
                actions.append(MemberDecl(member.text, ty, member.span))
            else:
                self._expect(TokenKind.COLON, "':'")
                ty = self._type_name()
                target = attributes if keyword.kind is TokenKind.ATTRIBUTE else events
                target.append(MemberDecl(member.text, ty, member.span))
        if self._at(TokenKind.EOF):
            self._fail(f"unterminated interface {name.text!r}")
        self._expect(TokenKind.RBRACE, "'}' or a member declaration")
        return InterfaceDecl(
            name.text, tuple(attributes), tuple(events), tuple(actions), start.span
        )

    def _type_name(self) -> TypeTag:
        tok = self._expect(TokenKind.IDENT, "type name")
        ty = _TYPE_NAMES.get(tok.text)
        if ty is None:
            self._fail(f"unknown type {tok.text!r} (expected Integer or Boolean)")
        return ty

    def _entity_decl(self) -> EntityDecl:
        name = self._expect(TokenKind.IDENT, "entity name")
        self._expect(TokenKind.COLON, "':'")
        iface = self._expect(TokenKind.IDENT, "interface name")
        self._expect(TokenKind.LBRACE, "'{'")
        inits: list[InitDecl] = []
        while self._at(TokenKind.IDENT):
            attr = self._advance()
            if not self._at(TokenKind.COLON, TokenKind.EQUALS):
                self._fail("expected ':' or '=' after attribute name")
            self._advance()
            inits.append(InitDecl(attr.text, self._literal(), attr.span))
            if self._at(TokenKind.COMMA):
                self._advance()
        if self._at(TokenKind.EOF):
            self._fail(f"unterminated entity {name.text!r}")
        self._expect(TokenKind.RBRACE, "'}' or an initializer")
        return EntityDecl(name.text, iface.text, tuple(inits), name.span)

    def _literal(self) -> Literal:
        tok = self._current()
        if tok.kind is TokenKind.INT:
            self._advance()
            return NumLit(int(tok.text), tok.span)
        if tok.kind in (TokenKind.TRUE, TokenKind.FALSE):
            self._advance()
            return BoolLit(tok.kind is TokenKind.TRUE, tok.span)
        self._fail(f"expected a literal, got {tok.text or tok.kind.value!r}")

    # ── orchestration layer ──────────────────────────────────────

    def _rule_block(self) -> list[RuleAst]:
        if not self._at(TokenKind.RULES):
            self._error("expected a rules block ('rules ... end')")
            return []
        self._advance()
        rules: list[RuleAst] = []
        while not self._at(TokenKind.END, TokenKind.EOF):
            try:
                rules.append(self._rule())
            except _Bail:
                self._sync(_RULE_SYNC)
                # a stray 'end' left behind by a broken rule: step over it
                if self._at(TokenKind.END) and self._peek(1).kind in _RULE_SYNC:
                    self._advance()
        if self._at(TokenKind.EOF):
            self._error("unterminated rules block (missing 'end')")
        else:
            self._advance()
        return rules

    def _rule(self) -> RuleAst:
        label: int | None = None
        start = self._current()
        if self._at(TokenKind.LPAREN):
            self._advance()
            num = self._expect(TokenKind.INT, "rule label")
            label = int(num.text)
            self._expect(TokenKind.RPAREN, "')'")
        self._expect(TokenKind.WHEN, "'when'")
        condition = self._event_or()
        self._expect(TokenKind.TRIGGER, "'trigger'")
        body = self._action_par()
        self._expect(TokenKind.END, "'end'")
        return RuleAst(label, condition, body, start.span)

    def _event_or(self) -> EventExpr:
        left = self._event_and()
        while self._at(TokenKind.OR):
            op = self._advance()
            left = EventOr(left, self._event_and(), op.span)
        return left

    def _event_and(self) -> EventExpr:
        left = self._event_atom()
        while self._at(TokenKind.AND):
            op = self._advance()
            left = EventAnd(left, self._event_atom(), op.span)
        return left

    def _event_atom(self) -> EventExpr:
        start = self._current()
        aggregated = self._at(TokenKind.ALL)
        if aggregated:
            self._advance()
        self._expect(TokenKind.EVENT, "'event'")
        name = self._expect(TokenKind.IDENT, "event name")
        self._expect(TokenKind.FROM, "'from'")
        decl = self._decl()
        filt = self._filter()
        test = self._bool_test()
        group_key: str | None = None
        if self._at(TokenKind.GROUPBY):
            self._advance()
            group_key = self._expect(TokenKind.IDENT, "groupby key").text
            aggregated = True
        atom = EventAtom(name.text, decl, filt, test, start.span)
        if aggregated:
            return Aggregate(atom, group_key, start.span)
        return atom

    def _bool_test(self) -> BoolTest:
        start = self._expect(TokenKind.VALUE, "'value'")
        if self._at(TokenKind.CHANGED):
            self._advance()
            return ValueChanged(start.span)
        self._expect(TokenKind.EQUALS, "'changed' or '='")
        return ValueEq(self._expr(), start.span)

    def _decl(self) -> Decl:
        name = self._expect(TokenKind.IDENT, "entity variable or entity name")
        if self._at(TokenKind.COLON):
            self._advance()
            iface = self._expect(TokenKind.IDENT, "interface name")
            return DeclTyped(name.text, iface.text, name.span)
        return DeclBare(name.text, name.span)

    def _filter(self) -> Filter | None:
        if not self._at(TokenKind.WITH):
            return None
        self._advance()
        attr = self._expect(TokenKind.IDENT, "attribute name")
        self._expect(TokenKind.EQUALS, "'='")
        return Filter(attr.text, self._expr(), attr.span)

    def _action_par(self) -> ActionExpr:
        left = self._action_seq()
        while self._at(TokenKind.PARPAR):
            op = self._advance()
            left = ActionPar(left, self._action_seq(), op.span)
        return left

    def _action_seq(self) -> ActionExpr:
        left = self._action_call()
        while self._at(TokenKind.COMMA):
            op = self._advance()
            left = ActionSeq(left, self._action_call(), op.span)
        return left

    def _action_call(self) -> ActionExpr:
        start = self._expect(TokenKind.ACTION, "'action'")
        name = self._expect(TokenKind.IDENT, "action name")
        self._expect(TokenKind.LPAREN, "'('")
        arg = self._expr()
        self._expect(TokenKind.RPAREN, "')'")
        self._expect(TokenKind.ON, "'on'")
        decl = self._decl()
        filt = self._filter()
        return ActionCall(name.text, arg, decl, filt, start.span)

    def _expr(self) -> Expr:
        tok = self._current()
        if tok.kind is TokenKind.INT:
            self._advance()
            return NumLit(int(tok.text), tok.span)
        if tok.kind in (TokenKind.TRUE, TokenKind.FALSE):
            self._advance()
            return BoolLit(tok.kind is TokenKind.TRUE, tok.span)
        if tok.kind is TokenKind.IDENT:
            self._advance()
            self._expect(TokenKind.DOT, "'.' (member access)")
            member = self._expect(TokenKind.IDENT, "member name")
            return Path(tok.text, member.text, tok.span)
        self._fail(f"expected a value expression, got {tok.text or tok.kind.value!r}")


def parse_program(text: str) -> ProgramAst:
    """Parse a full program; raise :class:`ParseError` listing all problems."""
    tokens, diagnostics = tokenize(text)
    parser = _Parser(tokens, diagnostics)
    program = parser.parse_program()
    if parser.diagnostics:
        raise ParseError(parser.diagnostics)
    return program


def parse_entity_decl(text: str) -> EntityDecl:
    """Parse a single ``name:Interface { ... }`` declaration (scripted deploys)."""
    tokens, diagnostics = tokenize(text)
    parser = _Parser(tokens, diagnostics)
    try:
        if parser._at(TokenKind.ENTITY):
            parser._advance()
        decl = parser._entity_decl()
        if not parser._at(TokenKind.EOF):
            parser._error("unexpected text after entity declaration")
    except _Bail:
        decl = None
    if parser.diagnostics:
        raise ParseError(parser.diagnostics)
    assert decl is not None
    return decl
