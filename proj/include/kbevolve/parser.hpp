/*
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

// ============================================================================
// kbevolve/parser.hpp — the native knowledge-base text format
// ============================================================================
//
// Grammar (ASCII, case-sensitive):
//
//   file      := section*
//   section   := "TBOX" gci* | "RBOX" rstmt* | "ABOX" assertion*
//   gci       := concept "[=" concept "."
//   rstmt     := role "[=" role "." | "trans" "(" role ")" "."
//   assertion := ident "(" ident ")" "." | ident "(" ident "," ident ")" "."
//   concept   := or
//   or        := and ("or" and)*                        (left-associative)
//   and       := unary ("and" unary)*                   (left-associative)
//   unary     := "not" unary | "exists" role "." unary
//              | "forall" role "." unary | "top" | "bot"
//              | ident | "(" concept ")"
//   role      := ident | "inv" "(" ident ")"
//   ident     := [A-Za-z_][A-Za-z0-9_]*
//
// Sections may appear in any order and are optional. Statements end with a
// period. Comments run from `#` to end of line. CRLF input is accepted; LF
// is emitted. Duplicate axioms/assertions collapse to a set.
//
// Reserved: grammar keywords, the identifier `false`, and identifiers
// starting with `__` (used for machine-generated symbols).
//
// A symbol used as a role (binary position) and as a concept (unary
// position) in the same input is a parse error.
// ============================================================================

#ifndef KBEVOLVE_PARSER_HPP
#define KBEVOLVE_PARSER_HPP

#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kbevolve/kb.hpp"

namespace kbevolve {

struct ParseError : std::runtime_error {
    int line = 1;
    int column = 1;
    std::string message;
    std::string token;

    ParseError(int l, int c, std::string msg, std::string tok)
        : std::runtime_error("parse error at " + std::to_string(l) + ":" + std::to_string(c) +
                             ": " + msg + (tok.empty() ? "" : " near '" + tok + "'")),
          line(l),
          column(c),
          message(std::move(msg)),
          token(std::move(tok)) {}
};

// ── Concept and role printing ───────────────────────────────────────────────

inline std::string role_text(const RoleExpr& r) {
    return r.inverted ? "inv(" + r.name + ")" : r.name;
}

namespace detail {

inline int concept_prec(const Concept& c) {
    switch (c.kind()) {
        case ConceptKind::Or: return 0;
        case ConceptKind::And: return 1;
        case ConceptKind::Not:
        case ConceptKind::Exists:
        case ConceptKind::Forall: return 2;
        default: return 3;
    }
}

inline void print_concept(std::ostream& os, const Concept& c, int min_prec) {
    const int p = concept_prec(c);
    const bool parens = p < min_prec;
    if (parens) os << "(";
    switch (c.kind()) {
        case ConceptKind::Top: os << "top"; break;
        case ConceptKind::Bottom: os << "bot"; break;
        case ConceptKind::Atomic: os << c.name(); break;
        case ConceptKind::Not:
            os << "not ";
            print_concept(os, c.child(), 2);
            break;
        case ConceptKind::And:
            print_concept(os, c.lhs(), 1);
            os << " and ";
            print_concept(os, c.rhs(), 2);
            break;
        case ConceptKind::Or:
            print_concept(os, c.lhs(), 0);
            os << " or ";
            print_concept(os, c.rhs(), 1);
            break;
        case ConceptKind::Exists:
        case ConceptKind::Forall:
            os << (c.kind() == ConceptKind::Exists ? "exists " : "forall ");
            os << role_text(c.role()) << ".";
            print_concept(os, c.child(), 2);
            break;
    }
    if (parens) os << ")";
}

}  // namespace detail

inline std::string concept_text(const Concept& c) {
    std::ostringstream os;
    detail::print_concept(os, c, 0);
    return os.str();
}

// ── Lexer ───────────────────────────────────────────────────────────────────

namespace detail {

enum class Tok { Ident, Subsumes, Dot, LParen, RParen, Comma, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return cur_; }

    Token next() {
        Token t = cur_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(cur_.line, cur_.col, msg, cur_.kind == Tok::End ? "" : cur_.text);
    }

private:
    void advance() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') bump();
            } else if (c == '\n' || c == '\r' || c == ' ' || c == '\t') {
                bump();
            } else {
                break;
            }
        }
        cur_.line = line_;
        cur_.col = col_;
        if (pos_ >= src_.size()) {
            cur_ = Token{Tok::End, "", line_, col_};
            return;
        }
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                bump();
            cur_ = Token{Tok::Ident, std::string(src_.substr(start, pos_ - start)), cur_.line,
                         cur_.col};
            return;
        }
        if (c == '[' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
            bump();
            bump();
            cur_ = Token{Tok::Subsumes, "[=", cur_.line, cur_.col};
            return;
        }
        Tok k;
        switch (c) {
            case '.': k = Tok::Dot; break;
            case '(': k = Tok::LParen; break;
            case ')': k = Tok::RParen; break;
            case ',': k = Tok::Comma; break;
            default:
                throw ParseError(line_, col_, "unexpected character", std::string(1, c));
        }
        bump();
        cur_ = Token{k, std::string(1, c), cur_.line, cur_.col};
    }

    void bump() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token cur_;
};

inline bool is_keyword(const std::string& s) {
    return s == "TBOX" || s == "RBOX" || s == "ABOX" || s == "top" || s == "bot" || s == "not" ||
           s == "and" || s == "or" || s == "exists" || s == "forall" || s == "inv" || s == "trans";
}

// ── Parser ──────────────────────────────────────────────────────────────────

class KbParser {
public:
    explicit KbParser(std::string_view src) : lex_(src) {}

    KnowledgeBase parse_file() {
        KnowledgeBase kb;
        while (lex_.peek().kind != Tok::End) {
            const Token& t = lex_.peek();
            if (t.kind != Tok::Ident ||
                (t.text != "TBOX" && t.text != "RBOX" && t.text != "ABOX"))
                lex_.fail("expected section header TBOX, RBOX or ABOX");
            std::string section = lex_.next().text;
            while (lex_.peek().kind != Tok::End && !at_section_header()) {
                if (section == "TBOX") {
                    Concept l = parse_concept();
                    expect(Tok::Subsumes, "expected '[=' in concept inclusion");
                    Concept r = parse_concept();
                    expect(Tok::Dot, "expected '.' after axiom");
                    kb.tbox.push_back(GCI{l, r});
                } else if (section == "RBOX") {
                    parse_rbox_statement(kb.rbox);
                } else {
                    kb.abox.push_back(parse_abox_statement());
                }
            }
        }
        kb.normalize();
        return kb;
    }

    Assertion parse_single_assertion() {
        Assertion a = parse_assertion_core();
        if (lex_.peek().kind != Tok::End) lex_.fail("trailing input after assertion");
        return a;
    }

private:
    bool at_section_header() {
        const Token& t = lex_.peek();
        return t.kind == Tok::Ident &&
               (t.text == "TBOX" || t.text == "RBOX" || t.text == "ABOX");
    }

    Token expect(Tok kind, const std::string& msg) {
        if (lex_.peek().kind != kind) lex_.fail(msg);
        return lex_.next();
    }

    std::string parse_name(const char* what) {
        const Token& t = lex_.peek();
        if (t.kind != Tok::Ident) lex_.fail(std::string("expected ") + what);
        if (is_keyword(t.text)) lex_.fail(std::string("keyword cannot be used as ") + what);
        if (t.text.rfind("__", 0) == 0)
            lex_.fail("identifiers starting with '__' are reserved");
        if (t.text == "false") lex_.fail("'false' is a reserved identifier");
        return lex_.next().text;
    }

    enum class Use { Concept, Role };

    void record_use(const std::string& name, Use u, const Token& at) {
        auto [it, inserted] = uses_.emplace(name, u);
        if (!inserted && it->second != u)
            throw ParseError(at.line, at.col,
                             u == Use::Role ? "symbol already used as a concept"
                                            : "symbol already used as a role",
                             name);
    }

    RoleExpr parse_role() {
        const Token& t = lex_.peek();
        if (t.kind == Tok::Ident && t.text == "inv") {
            lex_.next();
            expect(Tok::LParen, "expected '(' after inv");
            Token at = lex_.peek();
            std::string name = parse_name("role name");
            expect(Tok::RParen, "expected ')' after inverse role");
            record_use(name, Use::Role, at);
            return RoleExpr{name, true};
        }
        Token at = lex_.peek();
        std::string name = parse_name("role name");
        record_use(name, Use::Role, at);
        return RoleExpr{name, false};
    }

    Concept parse_concept() { return parse_or(); }

    Concept parse_or() {
        Concept c = parse_and();
        while (lex_.peek().kind == Tok::Ident && lex_.peek().text == "or") {
            lex_.next();
            c = Concept::disj(c, parse_and());
        }
        return c;
    }

    Concept parse_and() {
        Concept c = parse_unary();
        while (lex_.peek().kind == Tok::Ident && lex_.peek().text == "and") {
            lex_.next();
            c = Concept::conj(c, parse_unary());
        }
        return c;
    }

    Concept parse_unary() {
        const Token& t = lex_.peek();
        if (t.kind == Tok::LParen) {
            lex_.next();
            Concept c = parse_concept();
            expect(Tok::RParen, "expected ')'");
            return c;
        }
        if (t.kind != Tok::Ident) lex_.fail("expected concept");
        if (t.text == "top") return lex_.next(), Concept::top();
        if (t.text == "bot") return lex_.next(), Concept::bottom();
        if (t.text == "not") {
            lex_.next();
            return Concept::negation(parse_unary());
        }
        if (t.text == "exists" || t.text == "forall") {
            bool ex = t.text == "exists";
            lex_.next();
            RoleExpr r = parse_role();
            expect(Tok::Dot, "expected '.' between role and filler");
            Concept f = parse_unary();
            return ex ? Concept::exists(r, f) : Concept::forall(r, f);
        }
        Token at = lex_.peek();
        std::string name = parse_name("concept name");
        record_use(name, Use::Concept, at);
        return Concept::atomic(name);
    }

    void parse_rbox_statement(RBox& rbox) {
        const Token& t = lex_.peek();
        if (t.kind == Tok::Ident && t.text == "trans") {
            lex_.next();
            expect(Tok::LParen, "expected '(' after trans");
            RoleExpr r = parse_role();
            expect(Tok::RParen, "expected ')'");
            expect(Tok::Dot, "expected '.' after axiom");
            rbox.transitive.push_back(r);
            return;
        }
        RoleExpr sub = parse_role();
        expect(Tok::Subsumes, "expected '[=' in role inclusion");
        RoleExpr super = parse_role();
        expect(Tok::Dot, "expected '.' after axiom");
        rbox.inclusions.push_back(RoleInclusion{sub, super});
    }

    Assertion parse_abox_statement() {
        Assertion a = parse_assertion_core();
        expect(Tok::Dot, "expected '.' after assertion");
        return a;
    }

    Assertion parse_assertion_core() {
        Token at = lex_.peek();
        std::string pred = parse_name("predicate name");
        expect(Tok::LParen, "expected '(' in assertion");
        std::string a = parse_name("individual name");
        if (lex_.peek().kind == Tok::Comma) {
            lex_.next();
            std::string b = parse_name("individual name");
            expect(Tok::RParen, "expected ')'");
            record_use(pred, Use::Role, at);
            return Assertion::role_of(pred, a, b);
        }
        expect(Tok::RParen, "expected ')'");
        record_use(pred, Use::Concept, at);
        return Assertion::concept_of(pred, a);
    }

    Lexer lex_;
    std::map<std::string, Use> uses_;
};

}  // namespace detail

// ── Public operations ───────────────────────────────────────────────────────

inline KnowledgeBase parse_kb(std::string_view text) {
    return detail::KbParser(text).parse_file();
}

/// Accepts exactly the shapes "Name(ind)" and "Name(ind,ind)".
inline Assertion parse_assertion(std::string_view text) {
    return detail::KbParser(text).parse_single_assertion();
}

/// Deterministic serialization: sections in TBOX/RBOX/ABOX order, statements
/// sorted lexicographically, LF line endings. parse_kb(serialize_kb(kb)) == kb.
inline std::string serialize_kb(const KnowledgeBase& kb) {
    std::ostringstream os;
    os << "TBOX\n";
    std::vector<std::string> lines;
    for (const auto& g : kb.tbox)
        lines.push_back(concept_text(g.lhs) + " [= " + concept_text(g.rhs) + ".");
    std::sort(lines.begin(), lines.end());
    for (const auto& l : lines) os << l << "\n";

    os << "RBOX\n";
    lines.clear();
    for (const auto& ri : kb.rbox.inclusions)
        lines.push_back(role_text(ri.sub) + " [= " + role_text(ri.super) + ".");
    for (const auto& t : kb.rbox.transitive) lines.push_back("trans(" + role_text(t) + ").");
    std::sort(lines.begin(), lines.end());
    for (const auto& l : lines) os << l << "\n";

    os << "ABOX\n";
    lines.clear();
    for (const auto& a : kb.abox) lines.push_back(a.text() + ".");
    std::sort(lines.begin(), lines.end());
    for (const auto& l : lines) os << l << "\n";
    return os.str();
}

}  // namespace kbevolve

#endif  // KBEVOLVE_PARSER_HPP
