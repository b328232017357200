#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "query.hpp"

namespace cqbound {

namespace detail {

enum class Tok { Ident, Int, LParen, RParen, Comma, Colon, Turnstile, Arrow, Dot, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance();
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      continue;
    }
    std::size_t l = line, cl = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      std::string word(src.substr(i, j - i));
      if (word.rfind(kReservedPrefix, 0) == 0) {
        throw ParseError(l, cl, "identifier " + word + " uses the reserved prefix __");
      }
      out.push_back({Tok::Ident, word, l, cl});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Int, std::string(src.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    auto two = src.substr(i, 2);
    if (two == ":-") {
      out.push_back({Tok::Turnstile, ":-", l, cl});
      advance(2);
      continue;
    }
    if (two == "->") {
      out.push_back({Tok::Arrow, "->", l, cl});
      advance(2);
      continue;
    }
    Tok kind;
    switch (c) {
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case ',': kind = Tok::Comma; break;
      case ':': kind = Tok::Colon; break;
      case '.': kind = Tok::Dot; break;
      default: throw ParseError(l, cl, std::string("unexpected character '") + c + "'");
    }
    out.push_back({kind, std::string(1, c), l, cl});
    advance();
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

class QueryParser {
 public:
  explicit QueryParser(std::string_view text) : toks_(tokenize(text)) {}

  Query parse() {
    std::optional<NamedAtom> head;
    std::vector<NamedAtom> body;
    Declarations decls;
    while (peek().kind != Tok::End) {
      const Token& t = peek();
      bool keyword = t.kind == Tok::Ident && peek(1).kind != Tok::LParen;
      if (keyword && t.text == "key") {
        parse_key(decls);
      } else if (keyword && t.text == "fd") {
        parse_fd(decls);
      } else if (t.kind == Tok::Ident) {
        if (head) throw ParseError(t.line, t.column, "a query file holds exactly one rule");
        head = parse_atom();
        expect(Tok::Turnstile, "':-'");
        body.push_back(parse_atom());
        while (accept(Tok::Comma)) body.push_back(parse_atom());
        expect(Tok::Dot, "'.' after the rule body");
      } else {
        throw ParseError(t.line, t.column, "expected a rule or a declaration");
      }
    }
    if (!head) throw ParseError(peek().line, peek().column, "no query rule found");
    return Query::make(*head, body, std::move(decls));
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }

  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    ++pos_;
    return true;
  }

  const Token& expect(Tok kind, const char* what) {
    const Token& t = peek();
    if (t.kind != kind) {
      throw ParseError(t.line, t.column,
                       std::string("expected ") + what + ", found '" + (t.kind == Tok::End ? "end of input" : t.text) + "'");
    }
    ++pos_;
    return t;
  }

  std::string ident(const char* what) { return expect(Tok::Ident, what).text; }

  std::vector<std::string> var_list() {
    std::vector<std::string> vars{ident("a variable")};
    while (accept(Tok::Comma)) vars.push_back(ident("a variable"));
    return vars;
  }

  std::size_t position() {
    const Token& t = expect(Tok::Int, "a positive attribute position");
    std::size_t v = std::stoul(t.text);
    if (v == 0) throw ParseError(t.line, t.column, "attribute positions are 1-based");
    return v - 1;
  }

  std::vector<std::size_t> position_list() {
    std::vector<std::size_t> ps{position()};
    while (accept(Tok::Comma)) ps.push_back(position());
    return ps;
  }

  NamedAtom parse_atom() {
    NamedAtom atom{ident("a relation name"), {}};
    expect(Tok::LParen, "'('");
    atom.args = var_list();
    expect(Tok::RParen, "')'");
    return atom;
  }

  void parse_key(Declarations& decls) {
    ++pos_;
    std::string rel = ident("a relation name");
    expect(Tok::Colon, "':'");
    decls.keys.push_back({rel, position()});
    accept(Tok::Dot);
  }

  void parse_fd(Declarations& decls) {
    ++pos_;
    std::string rel = ident("a relation name or 'vars'");
    expect(Tok::Colon, "':'");
    if (rel == "vars") {
      auto lhs = var_list();
      expect(Tok::Arrow, "'->'");
      for (auto& rhs : var_list()) {
        if (std::find(lhs.begin(), lhs.end(), rhs) != lhs.end()) continue;
        decls.variable_fds.push_back({lhs, rhs});
      }
    } else {
      auto lhs = position_list();
      expect(Tok::Arrow, "'->'");
      for (auto rhs : position_list()) {
        if (std::find(lhs.begin(), lhs.end(), rhs) != lhs.end()) continue;
        decls.relation_fds.push_back({rel, lhs, rhs});
      }
    }
    accept(Tok::Dot);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a query file: one rule `Q(...) :- R(...), ... .` plus any number of
/// `key R: p`, `fd R: ps -> ps` and `fd vars: Xs -> Ys` declarations.
/// Compound right-hand sides are split into one FD per attribute.
inline Query parse_query(std::string_view text) { return detail::QueryParser(text).parse(); }

}  // namespace cqbound
