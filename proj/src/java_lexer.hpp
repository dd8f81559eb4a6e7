#pragma once

#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

namespace coordterm::javalex {

struct Tok {
  enum class Kind { Ident, Number, Str, Char, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 0;

  bool is(const char* s) const { return text == s; }
  bool ident() const { return kind == Kind::Ident; }
  bool punct(const char* s) const { return kind == Kind::Punct && text == s; }
};

// Comments are skipped; string/char literals become single tokens. `>` is
// always lexed alone so nested generic closers never fuse into `>>`.
inline std::vector<Tok> lex(const std::string& src) {
  std::vector<Tok> toks;
  int line = 1;
  std::size_t i = 0;
  const std::size_t n = src.size();

  auto isid = [](unsigned char c) {
    return std::isalnum(c) != 0 || c == '_' || c == '$' || c >= 0x80;
  };

  while (i < n) {
    const unsigned char c = static_cast<unsigned char>(src[i]);
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      while (i < n && src[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      i += 2;
      while (i + 1 < n && !(src[i] == '*' && src[i + 1] == '/')) {
        if (src[i] == '\n') ++line;
        ++i;
      }
      if (i + 1 >= n) throw std::runtime_error("unterminated block comment");
      i += 2;
      continue;
    }
    if (c == '"' || c == '\'') {
      const char quote = static_cast<char>(c);
      const int start_line = line;
      std::string text;
      ++i;
      while (i < n && src[i] != quote) {
        if (src[i] == '\\' && i + 1 < n) {
          text.push_back(src[i]);
          text.push_back(src[i + 1]);
          i += 2;
          continue;
        }
        if (src[i] == '\n') ++line;
        text.push_back(src[i]);
        ++i;
      }
      if (i >= n) throw std::runtime_error("unterminated literal");
      ++i;
      toks.push_back({quote == '"' ? Tok::Kind::Str : Tok::Kind::Char, text, start_line});
      continue;
    }
    if (std::isdigit(c)) {
      std::string text;
      while (i < n) {
        const unsigned char d = static_cast<unsigned char>(src[i]);
        if (std::isalnum(d) || d == '.' || d == '_') {
          text.push_back(src[i]);
          ++i;
          continue;
        }
        // exponent sign: 1e+5
        if ((d == '+' || d == '-') && !text.empty() &&
            (text.back() == 'e' || text.back() == 'E')) {
          text.push_back(src[i]);
          ++i;
          continue;
        }
        break;
      }
      toks.push_back({Tok::Kind::Number, text, line});
      continue;
    }
    if (isid(c)) {
      std::string text;
      while (i < n && isid(static_cast<unsigned char>(src[i]))) {
        text.push_back(src[i]);
        ++i;
      }
      toks.push_back({Tok::Kind::Ident, text, line});
      continue;
    }

    // multi-character punctuation we care to keep whole
    static const char* two[] = {"==", "!=", "<=", ">=", "&&", "||", "++", "--",
                                "->", "+=", "-=", "*=", "/=", "%=", "&=", "|=",
                                "^=", "::"};
    if (i + 2 < n && src.compare(i, 3, "...") == 0) {
      toks.push_back({Tok::Kind::Punct, "...", line});
      i += 3;
      continue;
    }
    bool matched = false;
    for (const char* op : two) {
      if (i + 1 < n && src.compare(i, 2, op) == 0) {
        toks.push_back({Tok::Kind::Punct, op, line});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    toks.push_back({Tok::Kind::Punct, std::string(1, static_cast<char>(c)), line});
    ++i;
  }
  toks.push_back({Tok::Kind::End, "", line});
  return toks;
}

}  // namespace coordterm::javalex
