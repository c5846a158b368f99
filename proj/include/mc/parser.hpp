#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mc/ast.hpp"
#include "mc/common.hpp"
#include "mc/lexer.hpp"
#include "mc/strutil.hpp"

namespace mc {

// A parsed file. Nodes hold string_views into `source`, so the unit owns the
// text for the lifetime of the tree.
struct ParsedUnit {
  int file_id = 0;
  std::string source;
  std::vector<Token> tokens;
  std::unique_ptr<AstNode> root;
  std::set<std::string> typedef_names;
  std::set<std::string> macro_names;   // #define names, object- and function-like
  std::set<std::string> enum_constants;

  std::string_view slice(const SourceSpan& s) const {
    return std::string_view(source).substr(s.byte_start, s.byte_end - s.byte_start);
  }
  // Printing a node reproduces its verbatim token slice.
  std::string print(const AstNode& n) const { return std::string(slice(n.span)); }
  std::string print() const { return print(*root); }
};

// Typedef-like names that headers commonly provide; mapped to whether they
// name an arithmetic scalar.
inline const std::map<std::string, bool>& builtin_typedefs() {
  static const std::map<std::string, bool> table = {
      {"size_t", true},    {"ssize_t", true},  {"ptrdiff_t", true},
      {"int8_t", true},    {"uint8_t", true},  {"int16_t", true},
      {"uint16_t", true},  {"int32_t", true},  {"uint32_t", true},
      {"int64_t", true},   {"uint64_t", true}, {"intptr_t", true},
      {"uintptr_t", true}, {"bool", true},     {"FILE", false},
  };
  return table;
}

class Parser {
public:
  Parser(std::string source, int file_id) {
    unit_.file_id = file_id;
    unit_.source = std::move(source);
    unit_.tokens = lex(unit_.source);
  }

  // Parses the whole file. Throws ParseError only on file-scope brace
  // imbalance; anything else degrades to Other nodes.
  ParsedUnit parse() {
    check_balance();
    auto root = make_node(NodeKind::TranslationUnit, 0);
    while (!at_eof()) {
      if (cur().kind == Tok::Directive) {
        root->add_child(directive_node());
        continue;
      }
      root->add_child(external_declaration());
    }
    finish_span(*root, pos_);
    root->span.byte_end = unit_.source.size();
    unit_.root = std::move(root);
    return std::move(unit_);
  }

private:
  ParsedUnit unit_;
  size_t pos_ = 0;

  const Token& tok(size_t i) const {
    return unit_.tokens[std::min(i, unit_.tokens.size() - 1)];
  }
  const Token& cur() const { return tok(pos_); }
  const Token& peek(size_t n = 1) const { return tok(pos_ + n); }
  bool at_eof() const { return cur().kind == Tok::Eof; }
  void advance() {
    if (!at_eof()) ++pos_;
  }
  bool is_punct(const Token& t, std::string_view p) const {
    return t.kind == Tok::Punct && t.text == p;
  }
  bool is_kw(const Token& t, std::string_view k) const {
    return t.kind == Tok::Ident && t.text == k;
  }

  void check_balance() {
    long depth = 0;
    for (const auto& t : unit_.tokens) {
      if (is_punct(t, "{")) ++depth;
      if (is_punct(t, "}")) --depth;
      if (depth < 0)
        throw ParseError("unbalanced '}' at line " + std::to_string(t.line));
    }
    if (depth != 0) throw ParseError("unbalanced braces at file scope");
  }

  std::unique_ptr<AstNode> make_node(NodeKind kind, size_t start_tok) {
    auto n = std::make_unique<AstNode>();
    n->kind = kind;
    n->span.file_id = unit_.file_id;
    n->span.byte_start = tok(start_tok).byte;
    n->span.line_start = tok(start_tok).line;
    return n;
  }

  // Closes a node's span at the token *before* end_tok.
  void finish_span(AstNode& n, size_t end_tok) {
    size_t last = end_tok > 0 ? end_tok - 1 : 0;
    n.span.byte_end = std::max(n.span.byte_start, tok(last).end);
    n.span.line_end = std::max(n.span.line_start, tok(last).line);
    n.text = unit_.slice(n.span);
  }

  std::unique_ptr<AstNode> zero_width_node(NodeKind kind, size_t at_tok) {
    auto n = make_node(kind, at_tok);
    n->span.byte_end = n->span.byte_start;
    n->span.line_end = n->span.line_start;
    return n;
  }

  std::unique_ptr<AstNode> directive_node() {
    auto n = make_node(starts_with(cur().text, "#pragma")
                           ? NodeKind::PragmaDirective
                           : NodeKind::Other,
                       pos_);
    if (starts_with(cur().text, "#define")) record_macro(cur().text);
    advance();
    finish_span(*n, pos_);
    return n;
  }

  void record_macro(std::string_view directive) {
    // "#define NAME ..." or "#define NAME(args) ..."
    size_t i = std::string_view("#define").size();
    while (i < directive.size() &&
           std::isspace(static_cast<unsigned char>(directive[i])))
      ++i;
    size_t start = i;
    while (i < directive.size() && is_ident_char(directive[i])) ++i;
    if (i > start) unit_.macro_names.insert(std::string(directive.substr(start, i - start)));
  }

  // Skips one balanced token group starting at an opener.
  void skip_balanced() {
    std::string_view open = cur().text;
    std::string_view close = open == "(" ? ")" : open == "[" ? "]" : "}";
    int depth = 0;
    while (!at_eof()) {
      if (is_punct(cur(), open)) ++depth;
      else if (is_punct(cur(), close)) {
        --depth;
        if (depth == 0) {
          advance();
          return;
        }
      }
      advance();
    }
  }

  bool looks_like_declaration() const {
    const Token& t = cur();
    if (t.kind != Tok::Ident) return false;
    if (is_decl_keyword(t.text)) return true;
    std::string name(t.text);
    if (unit_.typedef_names.count(name) || builtin_typedefs().count(name)) {
      // typedef name followed by a declarator shape
      const Token& n = peek();
      return n.kind == Tok::Ident || is_punct(n, "*");
    }
    return false;
  }

  // ---- expressions -------------------------------------------------------
  //
  // Expressions are kept as verbatim token runs; identifier and call
  // references are lifted out as child nodes so symbol analysis can see them.
  // `parent` receives Identifier/CallExpr children for tokens in
  // [from, to) (token indices).
  void scan_expr_refs(AstNode& parent, size_t from, size_t to) {
    for (size_t i = from; i < to; ++i) {
      const Token& t = tok(i);
      if (t.kind != Tok::Ident || is_c_keyword(t.text)) continue;
      if (i > from) {
        const Token& prev = tok(i - 1);
        if (is_punct(prev, ".") || is_punct(prev, "->")) continue;  // member
        if (prev.kind == Tok::Ident &&
            (prev.text == "struct" || prev.text == "union" || prev.text == "enum"))
          continue;  // tag in a cast or sizeof
        if (is_punct(prev, "goto")) continue;
      }
      auto node = std::make_unique<AstNode>();
      node->span.file_id = unit_.file_id;
      node->span.byte_start = t.byte;
      node->span.byte_end = t.end;
      node->span.line_start = node->span.line_end = t.line;
      node->text = t.text;
      node->name = std::string(t.text);
      node->kind = is_punct(tok(i + 1), "(") ? NodeKind::CallExpr : NodeKind::Identifier;
      parent.add_child(std::move(node));
    }
  }

  // Builds an expression container node covering tokens [from, to).
  std::unique_ptr<AstNode> expr_node(size_t from, size_t to) {
    if (from >= to) return zero_width_node(NodeKind::Other, from);
    auto n = make_node(NodeKind::Other, from);
    scan_expr_refs(*n, from, to);
    finish_span(*n, to);
    return n;
  }

  // Advances past one expression, stopping before any of the stop punctuators
  // at group depth 0. Returns [start, end) token indices.
  std::pair<size_t, size_t> consume_expr(const std::vector<std::string_view>& stops) {
    size_t start = pos_;
    while (!at_eof()) {
      if (is_punct(cur(), "(") || is_punct(cur(), "[") || is_punct(cur(), "{")) {
        skip_balanced();
        continue;
      }
      bool stop = is_punct(cur(), ")") || is_punct(cur(), "}");
      for (auto s : stops)
        if (is_punct(cur(), s)) stop = true;
      if (stop) break;
      advance();
    }
    return {start, pos_};
  }

  // ---- declarations ------------------------------------------------------

  struct SpecScan {
    std::string specifiers;
    bool is_static = false, is_extern = false, is_typedef = false;
    bool saw_type = false;        // a real type word (not just qualifiers)
    bool arithmetic = false;      // built from arithmetic keywords only
    std::string tag_kind;         // struct/union/enum if present
    std::string body_text;        // verbatim tag body if defined here
    std::vector<std::string> enum_constants;
    bool ok = false;
  };

  // Parses declaration specifiers at pos_. Storage-class words are recorded
  // as flags and left out of the specifier text used for regeneration.
  SpecScan scan_specifiers() {
    SpecScan out;
    std::vector<std::string> parts;
    bool progressed = false;
    while (!at_eof() && cur().kind == Tok::Ident) {
      std::string word(cur().text);
      if (word == "static") { out.is_static = true; advance(); progressed = true; continue; }
      if (word == "extern") { out.is_extern = true; advance(); progressed = true; continue; }
      if (word == "typedef") { out.is_typedef = true; advance(); progressed = true; continue; }
      if (word == "register" || word == "inline" || word == "__inline" ||
          word == "__inline__" || word == "__extension__") { advance(); progressed = true; continue; }
      if (word == "struct" || word == "union" || word == "enum") {
        out.tag_kind = word;
        parts.push_back(word);
        advance();
        if (cur().kind == Tok::Ident && !is_c_keyword(cur().text)) {
          parts.push_back(std::string(cur().text));
          advance();
        }
        if (is_punct(cur(), "{")) {
          size_t body_start = cur().byte;
          if (word == "enum") collect_enum_constants(out.enum_constants);
          skip_balanced();
          size_t body_end = tok(pos_ - 1).end;
          out.body_text = std::string(
              std::string_view(unit_.source).substr(body_start, body_end - body_start));
        }
        out.saw_type = true;
        progressed = true;
        continue;
      }
      if (word == "const" || word == "volatile" || word == "restrict" ||
          word == "__restrict" || word == "__restrict__") {
        parts.push_back(word);
        advance();
        progressed = true;
        continue;
      }
      if (is_arith_keyword(word)) {
        parts.push_back(word);
        out.saw_type = true;
        out.arithmetic = true;
        advance();
        progressed = true;
        continue;
      }
      if (word == "void") {
        parts.push_back(word);
        out.saw_type = true;
        advance();
        progressed = true;
        continue;
      }
      if (!out.saw_type && !is_c_keyword(word) &&
          (unit_.typedef_names.count(word) || builtin_typedefs().count(word))) {
        parts.push_back(word);
        out.saw_type = true;
        advance();
        progressed = true;
        continue;
      }
      break;
    }
    out.specifiers = join(parts, " ");
    out.ok = progressed && (out.saw_type || !parts.empty());
    return out;
  }

  // Reads the names out of an enum body without consuming it.
  void collect_enum_constants(std::vector<std::string>& out) {
    size_t i = pos_;  // at '{'
    int depth = 0;
    bool expect_name = true;
    while (i < unit_.tokens.size()) {
      const Token& t = tok(i);
      if (is_punct(t, "{")) { ++depth; ++i; expect_name = true; continue; }
      if (is_punct(t, "}")) { if (--depth == 0) break; ++i; continue; }
      if (depth == 1) {
        if (expect_name && t.kind == Tok::Ident && !is_c_keyword(t.text)) {
          out.push_back(std::string(t.text));
          expect_name = false;
        } else if (is_punct(t, ",")) {
          expect_name = true;
        }
      }
      ++i;
    }
  }

  // Parses one declarator at pos_ (after specifiers). Stops before ',', ';',
  // '=', ')' at depth 0. Returns false if no name was found.
  bool parse_declarator(Declarator& d) {
    size_t start = pos_;
    // pointer prefix
    std::vector<std::string> ptr;
    while (is_punct(cur(), "*") || is_kw(cur(), "const") ||
           is_kw(cur(), "volatile") || is_kw(cur(), "restrict") ||
           is_kw(cur(), "__restrict") || is_kw(cur(), "__restrict__")) {
      ptr.push_back(std::string(cur().text));
      advance();
    }
    d.pointer_prefix = join(ptr, " ");
    bool parenthesized = false;
    if (is_punct(cur(), "(")) {
      // function pointer or grouped declarator: treat the group verbatim
      parenthesized = true;
      advance();
      while (is_punct(cur(), "*")) {
        d.pointer_prefix += d.pointer_prefix.empty() ? "*" : " *";
        advance();
      }
    }
    if (cur().kind != Tok::Ident || is_c_keyword(cur().text)) return false;
    d.name = std::string(cur().text);
    d.name_byte = cur().byte;
    advance();
    if (parenthesized) {
      // consume up to the matching ')'
      while (!at_eof() && !is_punct(cur(), ")")) advance();
      if (is_punct(cur(), ")")) advance();
      // whatever follows a grouped declarator (arrays / params) is kept as text
    }
    while (true) {
      if (is_punct(cur(), "[")) {
        size_t open = pos_;
        skip_balanced();
        size_t inner_start = tok(open).end;
        size_t inner_end = tok(pos_ - 1).byte;
        d.array_dims.push_back(trim(
            std::string_view(unit_.source).substr(inner_start, inner_end - inner_start)));
        continue;
      }
      if (is_punct(cur(), "(")) {
        if (parenthesized) {
          // function-pointer parameter list: part of the declarator text
          d.is_fn_pointer = true;
          skip_balanced();
          continue;
        }
        d.is_function = true;
        size_t open = pos_;
        skip_balanced();
        size_t inner_start = tok(open).end;
        size_t inner_end = tok(pos_ - 1).byte;
        d.params_text = trim(
            std::string_view(unit_.source).substr(inner_start, inner_end - inner_start));
        continue;
      }
      break;
    }
    size_t end_byte = pos_ > start ? tok(pos_ - 1).end : tok(start).byte;
    d.text_no_init = std::string(
        std::string_view(unit_.source).substr(tok(start).byte, end_byte - tok(start).byte));
    return true;
  }

  // Parses a full declaration (specifiers already scanned) through ';'.
  // Fills decl info and registers typedef names. Initializer expressions get
  // reference children on the node.
  void parse_declaration_tail(AstNode& node, SpecScan spec) {
    auto info = std::make_unique<DeclInfo>();
    info->specifiers = spec.specifiers;
    info->is_static = spec.is_static;
    info->is_extern = spec.is_extern;
    info->is_typedef = spec.is_typedef;
    info->enum_constants = spec.enum_constants;
    info->body_text = spec.body_text;
    for (const auto& e : spec.enum_constants) unit_.enum_constants.insert(e);

    while (!at_eof() && !is_punct(cur(), ";")) {
      Declarator d;
      size_t before = pos_;
      if (!parse_declarator(d)) {
        // unreadable declarator: skip to ',' or ';'
        while (!at_eof() && !is_punct(cur(), ",") && !is_punct(cur(), ";"))
          if (is_punct(cur(), "(") || is_punct(cur(), "[") || is_punct(cur(), "{"))
            skip_balanced();
          else
            advance();
        if (is_punct(cur(), ",")) advance();
        if (pos_ == before) advance();
        continue;
      }
      if (spec.is_typedef) unit_.typedef_names.insert(d.name);
      info->declarators.push_back(d);
      if (is_punct(cur(), "=")) {
        advance();
        auto [from, to] = consume_expr({",", ";"});
        scan_expr_refs(node, from, to);
      }
      // VLA dimensions may reference identifiers
      for (const auto& dim : info->declarators.back().array_dims) {
        auto dim_tokens = lex(dim);
        for (const auto& t : dim_tokens) {
          if (t.kind == Tok::Ident && !is_c_keyword(t.text)) {
            auto ref = std::make_unique<AstNode>();
            ref->kind = NodeKind::Identifier;
            ref->name = std::string(t.text);
            ref->span = node.span;  // zero-width positional info is fine here
            ref->span.byte_end = ref->span.byte_start;
            node.add_child(std::move(ref));
          }
        }
      }
      if (is_punct(cur(), ",")) advance();
    }
    if (is_punct(cur(), ";")) advance();
    node.decl = std::move(info);
  }

  // ---- statements --------------------------------------------------------

  std::unique_ptr<AstNode> parse_statement() {
    const Token& t = cur();
    if (t.kind == Tok::Directive) return directive_node();
    if (is_punct(t, "{")) return parse_compound();
    if (is_punct(t, ";")) {
      auto n = make_node(NodeKind::ExprStmt, pos_);
      advance();
      finish_span(*n, pos_);
      return n;
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "for") return parse_for();
      if (t.text == "while") return parse_while();
      if (t.text == "do") return parse_do_while();
      if (t.text == "if") return parse_if();
      if (t.text == "return") {
        auto n = make_node(NodeKind::ReturnStmt, pos_);
        advance();
        auto [from, to] = consume_expr({";"});
        scan_expr_refs(*n, from, to);
        if (is_punct(cur(), ";")) advance();
        finish_span(*n, pos_);
        return n;
      }
      if (t.text == "goto") {
        auto n = make_node(NodeKind::GotoStmt, pos_);
        advance();
        if (cur().kind == Tok::Ident) {
          n->name = std::string(cur().text);
          advance();
        }
        if (is_punct(cur(), ";")) advance();
        finish_span(*n, pos_);
        return n;
      }
      if (t.text == "break" || t.text == "continue") {
        auto n = make_node(NodeKind::Other, pos_);
        advance();
        if (is_punct(cur(), ";")) advance();
        finish_span(*n, pos_);
        return n;
      }
      if (t.text == "switch") {
        return unsupported_statement();
      }
      // label: ident ':' not followed by another ':'
      if (!is_c_keyword(t.text) && is_punct(peek(), ":")) {
        auto n = make_node(NodeKind::LabelStmt, pos_);
        n->name = std::string(t.text);
        advance();
        advance();  // ':'
        finish_span(*n, pos_);
        return n;
      }
      if (looks_like_declaration()) {
        auto n = make_node(NodeKind::Declaration, pos_);
        SpecScan spec = scan_specifiers();
        if (spec.ok) {
          parse_declaration_tail(*n, std::move(spec));
          finish_span(*n, pos_);
          return n;
        }
        // fall through to expression statement on a failed scan
      }
    }
    // expression statement
    auto n = make_node(NodeKind::ExprStmt, pos_);
    size_t before = pos_;
    auto [from, to] = consume_expr({";"});
    scan_expr_refs(*n, from, to);
    if (is_punct(cur(), ";")) advance();
    if (pos_ == before) {
      // stray token (e.g. unmatched ')'); consume it as unsupported
      advance();
      n->unsupported = true;
    }
    finish_span(*n, pos_);
    return n;
  }

  std::unique_ptr<AstNode> unsupported_statement() {
    auto n = make_node(NodeKind::Other, pos_);
    n->unsupported = true;
    // consume a whole construct: keyword, any parenthesized heads, the body
    // if braced
    advance();
    while (!at_eof()) {
      if (is_punct(cur(), "(")) { skip_balanced(); continue; }
      if (is_punct(cur(), "{")) {
        skip_balanced();
        break;
      }
      if (is_punct(cur(), ";")) { advance(); break; }
      if (is_punct(cur(), "}")) break;
      advance();
    }
    finish_span(*n, pos_);
    return n;
  }

  std::unique_ptr<AstNode> parse_compound() {
    auto n = make_node(NodeKind::CompoundStmt, pos_);
    advance();  // '{'
    while (!at_eof() && !is_punct(cur(), "}")) {
      n->add_child(parse_statement());
    }
    if (is_punct(cur(), "}")) advance();
    finish_span(*n, pos_);
    return n;
  }

  std::unique_ptr<AstNode> parse_for() {
    auto n = make_node(NodeKind::ForStmt, pos_);
    advance();  // 'for'
    if (!is_punct(cur(), "(")) {
      n->unsupported = true;
      finish_span(*n, pos_);
      return n;
    }
    advance();  // '('
    // init slot: declaration, expression, or empty
    if (is_punct(cur(), ";")) {
      n->add_child(zero_width_node(NodeKind::ExprStmt, pos_));
      advance();
    } else if (looks_like_declaration()) {
      auto init = make_node(NodeKind::Declaration, pos_);
      SpecScan spec = scan_specifiers();
      parse_declaration_tail(*init, std::move(spec));
      finish_span(*init, pos_);
      n->add_child(std::move(init));
    } else {
      auto [from, to] = consume_expr({";"});
      auto init = expr_node(from, to);
      init->kind = NodeKind::ExprStmt;
      n->add_child(std::move(init));
      if (is_punct(cur(), ";")) advance();
    }
    // cond slot
    {
      auto [from, to] = consume_expr({";"});
      n->add_child(expr_node(from, to));
      if (is_punct(cur(), ";")) advance();
    }
    // step slot: runs to the ')' matching the for-open
    {
      auto [from, to] = consume_expr({});
      n->add_child(expr_node(from, to));
      if (is_punct(cur(), ")")) advance();
    }
    n->add_child(parse_statement());  // body
    finish_span(*n, pos_);
    return n;
  }

  std::unique_ptr<AstNode> parse_while() {
    auto n = make_node(NodeKind::WhileStmt, pos_);
    advance();
    if (is_punct(cur(), "(")) {
      advance();
      auto [from, to] = consume_expr({});
      n->add_child(expr_node(from, to));
      if (is_punct(cur(), ")")) advance();
    } else {
      n->add_child(zero_width_node(NodeKind::Other, pos_));
    }
    n->add_child(parse_statement());
    finish_span(*n, pos_);
    return n;
  }

  std::unique_ptr<AstNode> parse_do_while() {
    auto n = make_node(NodeKind::DoWhileStmt, pos_);
    advance();  // 'do'
    n->add_child(parse_statement());
    if (is_kw(cur(), "while")) {
      advance();
      if (is_punct(cur(), "(")) {
        advance();
        auto [from, to] = consume_expr({});
        n->add_child(expr_node(from, to));
        if (is_punct(cur(), ")")) advance();
      }
    }
    if (is_punct(cur(), ";")) advance();
    finish_span(*n, pos_);
    return n;
  }

  std::unique_ptr<AstNode> parse_if() {
    auto n = make_node(NodeKind::IfStmt, pos_);
    advance();
    if (is_punct(cur(), "(")) {
      advance();
      auto [from, to] = consume_expr({});
      n->add_child(expr_node(from, to));
      if (is_punct(cur(), ")")) advance();
    } else {
      n->add_child(zero_width_node(NodeKind::Other, pos_));
    }
    n->add_child(parse_statement());
    if (is_kw(cur(), "else")) {
      advance();
      n->add_child(parse_statement());
    }
    finish_span(*n, pos_);
    return n;
  }

  // ---- external declarations ----------------------------------------------

  std::unique_ptr<AstNode> external_declaration() {
    size_t start = pos_;
    SpecScan spec = scan_specifiers();
    if (!spec.ok) {
      // something we cannot classify; swallow to the next ';' or balanced '}'
      auto n = make_node(NodeKind::Other, start);
      n->unsupported = true;
      pos_ = start;
      skip_unknown_top_level();
      finish_span(*n, pos_);
      return n;
    }
    // bare "struct S { ... };" or "enum { ... };"
    if (is_punct(cur(), ";")) {
      auto n = make_node(NodeKind::Declaration, start);
      advance();
      auto info = std::make_unique<DeclInfo>();
      info->specifiers = spec.specifiers;
      info->is_static = spec.is_static;
      info->is_extern = spec.is_extern;
      info->is_typedef = spec.is_typedef;
      info->enum_constants = spec.enum_constants;
      info->body_text = spec.body_text;
      for (const auto& e : spec.enum_constants) unit_.enum_constants.insert(e);
      n->decl = std::move(info);
      finish_span(*n, pos_);
      return n;
    }

    // Peek one declarator to decide function definition vs declaration.
    size_t after_spec = pos_;
    Declarator first;
    bool got = parse_declarator(first);
    if (got && first.is_function && is_punct(cur(), "{")) {
      auto n = make_node(NodeKind::FunctionDef, start);
      auto fi = std::make_unique<FuncInfo>();
      fi->name = first.name;
      fi->is_static = spec.is_static;
      fi->proto_end = tok(pos_ - 1).end;  // byte after ')'
      parse_param_list(first.params_text, *fi);
      n->func = std::move(fi);
      n->name = first.name;
      // body; degrade to opaque on any internal surprise
      size_t body_start = pos_;
      try {
        n->add_child(parse_compound());
      } catch (const std::exception&) {
        pos_ = body_start;
        auto body = make_node(NodeKind::Other, pos_);
        body->unsupported = true;
        skip_balanced();
        finish_span(*body, pos_);
        n->add_child(std::move(body));
      }
      finish_span(*n, pos_);
      return n;
    }

    // plain declaration (possibly several declarators); reparse from the top
    pos_ = after_spec;
    auto n = make_node(NodeKind::Declaration, start);
    parse_declaration_tail(*n, std::move(spec));
    finish_span(*n, pos_);
    // K&R style bodies and other shapes we cannot read: if we stopped right
    // before '{', swallow it as an unsupported sibling
    if (is_punct(cur(), "{")) {
      n->unsupported = true;
      skip_balanced();
      finish_span(*n, pos_);
    }
    return n;
  }

  void skip_unknown_top_level() {
    while (!at_eof()) {
      if (is_punct(cur(), "{")) { skip_balanced(); return; }
      if (is_punct(cur(), ";")) { advance(); return; }
      if (cur().kind == Tok::Directive) return;
      advance();
    }
  }

  // Parses "double a, double (*b)[8], int n" into ParamDecls. Best effort:
  // unreadable entries are dropped (their absence later makes affected nests
  // ineligible through unknown-symbol resolution).
  void parse_param_list(const std::string& text, FuncInfo& fi) {
    if (trim(text).empty() || trim(text) == "void") return;
    // split on top-level commas
    auto toks = lex(text);
    std::vector<std::pair<size_t, size_t>> pieces;
    size_t start = 0;
    int depth = 0;
    for (size_t i = 0; i < toks.size(); ++i) {
      const Token& t = toks[i];
      if (t.kind == Tok::Punct &&
          (t.text == "(" || t.text == "[" || t.text == "{"))
        ++depth;
      if (t.kind == Tok::Punct &&
          (t.text == ")" || t.text == "]" || t.text == "}"))
        --depth;
      bool is_comma = t.kind == Tok::Punct && t.text == "," && depth == 0;
      if (is_comma || t.kind == Tok::Eof) {
        pieces.emplace_back(start, i);
        start = i + 1;
      }
    }
    for (auto [b, e] : pieces) {
      if (b >= e) continue;
      if (toks[b].text == "...") {
        fi.variadic = true;
        continue;
      }
      std::string piece = std::string(text).substr(
          toks[b].byte, (e > b ? toks[e - 1].end : toks[b].byte) - toks[b].byte);
      Parser sub(piece + ";", unit_.file_id);
      sub.unit_.typedef_names = unit_.typedef_names;
      SpecScan spec = sub.scan_specifiers();
      if (!spec.ok) continue;
      Declarator d;
      if (!sub.parse_declarator(d)) continue;
      ParamDecl p;
      p.specifiers = spec.specifiers;
      p.dtor = d;
      fi.params.push_back(std::move(p));
    }
  }
};

inline ParsedUnit parse_unit(std::string source_text, int file_id = 0) {
  Parser p(std::move(source_text), file_id);
  return p.parse();
}

}  // namespace mc
