#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace mc {

enum class Tok {
  Ident,
  Number,
  String,
  CharLit,
  Punct,
  Directive,  // whole preprocessor line, continuations folded in
  Eof,
};

struct Token {
  Tok kind = Tok::Eof;
  std::string_view text;  // view into the source buffer
  size_t byte = 0;        // byte offset of first character
  size_t end = 0;         // one past last character
  int line = 1;           // 1-based
};

inline bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool is_ident_char(char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9');
}

// Multi-character punctuators, longest first so maximal munch works.
inline const std::vector<std::string_view>& punctuators() {
  static const std::vector<std::string_view> table = {
      "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==",
      "!=",  "&&",  "||",  "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
  };
  return table;
}

// Tokenizes the practical C subset. Comments and whitespace are skipped but
// every token keeps its byte span, so verbatim slices of the original text
// remain available for regeneration.
inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  size_t i = 0;
  int line = 1;
  bool at_line_start = true;

  auto push = [&](Tok kind, size_t begin, size_t end, int ln) {
    out.push_back(Token{kind, src.substr(begin, end - begin), begin, end, ln});
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
      at_line_start = true;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      i += 2;
      while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/')) {
        if (src[i] == '\n') ++line;
        ++i;
      }
      i = (i + 1 < src.size()) ? i + 2 : src.size();
      continue;
    }
    if (c == '#' && at_line_start) {
      size_t begin = i;
      int ln = line;
      while (i < src.size() && src[i] != '\n') {
        if (src[i] == '\\' && i + 1 < src.size() && src[i + 1] == '\n') {
          ++line;
          i += 2;
          continue;
        }
        ++i;
      }
      push(Tok::Directive, begin, i, ln);
      continue;  // leave the newline for the loop so at_line_start resets
    }
    at_line_start = false;
    if (is_ident_start(c)) {
      size_t begin = i;
      while (i < src.size() && is_ident_char(src[i])) ++i;
      push(Tok::Ident, begin, i, line);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() &&
         std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      // pp-number: digits, idents, dots, and sign after exponent markers
      size_t begin = i;
      ++i;
      while (i < src.size()) {
        char d = src[i];
        if (is_ident_char(d) || d == '.') {
          ++i;
        } else if ((d == '+' || d == '-') && i > begin &&
                   (src[i - 1] == 'e' || src[i - 1] == 'E' ||
                    src[i - 1] == 'p' || src[i - 1] == 'P')) {
          ++i;
        } else {
          break;
        }
      }
      push(Tok::Number, begin, i, line);
      continue;
    }
    if (c == '"' || c == '\'') {
      char quote = c;
      size_t begin = i;
      int ln = line;
      ++i;
      while (i < src.size() && src[i] != quote) {
        if (src[i] == '\\' && i + 1 < src.size()) {
          i += 2;
        } else {
          if (src[i] == '\n') ++line;
          ++i;
        }
      }
      if (i < src.size()) ++i;  // closing quote
      push(quote == '"' ? Tok::String : Tok::CharLit, begin, i, ln);
      continue;
    }
    // punctuator, maximal munch
    {
      size_t matched = 1;
      for (std::string_view p : punctuators()) {
        if (src.size() - i >= p.size() && src.substr(i, p.size()) == p) {
          matched = p.size();
          break;
        }
      }
      push(Tok::Punct, i, i + matched, line);
      i += matched;
    }
  }
  push(Tok::Eof, src.size(), src.size(), line);
  return out;
}

inline bool is_c_keyword(std::string_view s) {
  static const std::vector<std::string_view> kw = {
      "auto",     "break",    "case",     "char",   "const",    "continue",
      "default",  "do",       "double",   "else",   "enum",     "extern",
      "float",    "for",      "goto",     "if",     "inline",   "int",
      "long",     "register", "restrict", "return", "short",    "signed",
      "sizeof",   "static",   "struct",   "switch", "typedef",  "union",
      "unsigned", "void",     "volatile", "while",  "_Bool",    "__restrict",
      "__restrict__",         "__inline", "__inline__",         "__extension__",
  };
  for (auto k : kw)
    if (k == s) return true;
  return false;
}

// Specifier keywords that can open a declaration.
inline bool is_decl_keyword(std::string_view s) {
  static const std::vector<std::string_view> kw = {
      "void",   "char",     "short",    "int",      "long",   "float",
      "double", "signed",   "unsigned", "_Bool",    "const",  "volatile",
      "static", "extern",   "register", "typedef",  "struct", "union",
      "enum",   "inline",   "restrict", "__restrict", "__restrict__",
      "__inline", "__inline__",
  };
  for (auto k : kw)
    if (k == s) return true;
  return false;
}

inline bool is_arith_keyword(std::string_view s) {
  static const std::vector<std::string_view> kw = {
      "char", "short", "int", "long", "float", "double", "signed", "unsigned",
      "_Bool",
  };
  for (auto k : kw)
    if (k == s) return true;
  return false;
}

}  // namespace mc
