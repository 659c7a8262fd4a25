#pragma once

// Tokenizer shared by the principle, formula and interpretation readers.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "finprin/errors.hpp"

namespace finprin::detail {

struct Token {
  enum class Kind { Ident, Nat, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;

  bool is(std::string_view p) const { return kind != Kind::End && text == p && kind != Kind::Nat; }
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j, ++i) {
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
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Token::Kind::Nat;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else {
      static constexpr std::string_view two[] = {"!=", ":="};
      t.kind = Token::Kind::Punct;
      bool matched = false;
      for (auto p : two) {
        if (src.substr(i, 2) == p) {
          t.text = std::string(p);
          advance(2);
          matched = true;
          break;
        }
      }
      if (!matched) {
        static constexpr std::string_view one = "{}()/,.|&!=<:;";
        if (one.find(c) == std::string_view::npos)
          throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
        t.text = std::string(1, c);
        advance(1);
      }
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Token::Kind::End;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

class TokenStream {
 public:
  explicit TokenStream(std::string_view src) : toks_(tokenize(src)) {}

  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool accept(std::string_view p) {
    if (peek().is(p)) {
      next();
      return true;
    }
    return false;
  }
  const Token& expect(std::string_view p) {
    if (!peek().is(p)) fail("expected '" + std::string(p) + "'");
    return next();
  }
  std::string ident() {
    if (peek().kind != Token::Kind::Ident) fail("expected identifier");
    return next().text;
  }
  unsigned nat() {
    if (peek().kind != Token::Kind::Nat) fail("expected number");
    return static_cast<unsigned>(std::stoul(next().text));
  }
  bool at_end() const { return peek().kind == Token::Kind::End; }

  [[noreturn]] void fail(const std::string& msg) const { fail_at(peek(), msg); }
  [[noreturn]] static void fail_at(const Token& t, const std::string& msg) {
    std::string got = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(msg + " (got " + got + ")", t.line, t.column);
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace finprin::detail
