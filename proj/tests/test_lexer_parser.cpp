#include <string>
#include <vector>

#include "doctest.h"
#include "mc/parser.hpp"

using namespace mc;

namespace {

std::vector<Tok> kinds_of(const std::vector<Token>& toks) {
  std::vector<Tok> out;
  for (const auto& t : toks) out.push_back(t.kind);
  return out;
}

const AstNode* first_of(const AstNode& root, NodeKind k) {
  const AstNode* found = nullptr;
  walk(root, [&](const AstNode& n) {
    if (!found && n.kind == k) found = &n;
  });
  return found;
}

int count_of(const AstNode& root, NodeKind k) {
  int c = 0;
  walk(root, [&](const AstNode& n) { c += n.kind == k; });
  return c;
}

}  // namespace

TEST_CASE("lexer token kinds and positions") {
  std::string src = "int x = 0x1f; // note\nchar c = 'a'; /* block */ double d = 1.5e3;";
  auto toks = lex(src);
  REQUIRE(!toks.empty());
  CHECK(toks[0].kind == Tok::Ident);
  CHECK(toks[0].text == "int");
  CHECK(toks[0].byte == 0);
  CHECK(toks[0].line == 1);

  // comments vanish; literals keep their exact spelling; the single Eof
  // sentinel sits at the very end
  bool saw_hex = false, saw_char = false, saw_float = false;
  for (size_t i = 0; i < toks.size(); ++i) {
    const auto& t = toks[i];
    if (t.kind == Tok::Number && t.text == "0x1f") saw_hex = true;
    if (t.kind == Tok::CharLit && t.text == "'a'") saw_char = true;
    if (t.kind == Tok::Number && t.text == "1.5e3") saw_float = true;
    CHECK((t.kind == Tok::Eof) == (i + 1 == toks.size()));
  }
  CHECK(saw_hex);
  CHECK(saw_char);
  CHECK(saw_float);
}

TEST_CASE("lexer strings with escapes and multi-char punctuators") {
  std::string src = "s = \"a\\\"b\"; x >>= 2; p->q += 1;";
  auto toks = lex(src);
  bool saw_string = false, saw_shift = false, saw_arrow = false, saw_plus_eq = false;
  for (const auto& t : toks) {
    if (t.kind == Tok::String && t.text == "\"a\\\"b\"") saw_string = true;
    if (t.kind == Tok::Punct && t.text == ">>=") saw_shift = true;
    if (t.kind == Tok::Punct && t.text == "->") saw_arrow = true;
    if (t.kind == Tok::Punct && t.text == "+=") saw_plus_eq = true;
  }
  CHECK(saw_string);
  CHECK(saw_shift);
  CHECK(saw_arrow);
  CHECK(saw_plus_eq);
}

TEST_CASE("lexer folds directive continuations into one token") {
  std::string src = "#define BIG(x) \\\n  ((x) + 1)\nint y;";
  auto toks = lex(src);
  REQUIRE(toks[0].kind == Tok::Directive);
  CHECK(toks[0].text.find("((x) + 1)") != std::string_view::npos);
  CHECK(toks[1].text == "int");
}

TEST_CASE("parser reproduces the file verbatim") {
  std::string src =
      "#include <stdio.h>\n"
      "#define N 4\n"
      "int g;\n"
      "void f(void) {\n"
      "  for (int i = 0; i < N; i++)\n"
      "    g += i;\n"
      "}\n";
  ParsedUnit unit = parse_unit(src);
  CHECK(unit.print() == src);
  CHECK(unit.macro_names.count("N") == 1);
}

TEST_CASE("parser finds structured statements") {
  std::string src =
      "void f(int n) {\n"
      "  int i = 0;\n"
      "  while (i < n) { i++; }\n"
      "  do { i--; } while (i > 0);\n"
      "  for (i = 0; i < n; i++) {\n"
      "    if (i % 2) continue;\n"
      "  }\n"
      "}\n";
  ParsedUnit unit = parse_unit(src);
  REQUIRE(first_of(*unit.root, NodeKind::FunctionDef) != nullptr);
  CHECK(count_of(*unit.root, NodeKind::WhileStmt) == 1);
  CHECK(count_of(*unit.root, NodeKind::DoWhileStmt) == 1);
  CHECK(count_of(*unit.root, NodeKind::ForStmt) == 1);
  CHECK(count_of(*unit.root, NodeKind::IfStmt) == 1);

  const AstNode* f = first_of(*unit.root, NodeKind::ForStmt);
  CHECK(std::string(unit.slice(f->span)).substr(0, 4) == "for ");
}

TEST_CASE("for nest inside a do-while body is visible") {
  std::string src =
      "void f(int n) {\n"
      "  do {\n"
      "    for (int i = 0; i < n; i++) n--;\n"
      "  } while (n > 0);\n"
      "}\n";
  ParsedUnit unit = parse_unit(src);
  const AstNode* dw = first_of(*unit.root, NodeKind::DoWhileStmt);
  REQUIRE(dw != nullptr);
  CHECK(first_of(*dw, NodeKind::ForStmt) != nullptr);
  bool any_unsupported = false;
  walk(*unit.root, [&](const AstNode& n) { any_unsupported |= n.unsupported; });
  CHECK(!any_unsupported);
}

TEST_CASE("switch statements are opaque and flagged") {
  std::string src =
      "void f(int n) {\n"
      "  switch (n) { case 1: n = 2; break; default: break; }\n"
      "}\n";
  ParsedUnit unit = parse_unit(src);
  bool any_unsupported = false;
  walk(*unit.root, [&](const AstNode& n) { any_unsupported |= n.unsupported; });
  CHECK(any_unsupported);
  CHECK(unit.print() == src);
}

TEST_CASE("declaration shapes survive the declarator parser") {
  std::string src =
      "typedef unsigned long ulong_t;\n"
      "enum color { RED, GREEN = 3 };\n"
      "double *p, grid[4][8];\n"
      "int (*handler)(int, double);\n"
      "static int quiet;\n";
  ParsedUnit unit = parse_unit(src);
  CHECK(unit.typedef_names.count("ulong_t") == 1);
  CHECK(unit.enum_constants.count("RED") == 1);
  CHECK(unit.enum_constants.count("GREEN") == 1);

  const DeclInfo* grid_decl = nullptr;
  const DeclInfo* handler_decl = nullptr;
  for (const auto& c : unit.root->children) {
    if (c->kind != NodeKind::Declaration || !c->decl) continue;
    for (const auto& d : c->decl->declarators) {
      if (d.name == "grid") grid_decl = c->decl.get();
      if (d.name == "handler") handler_decl = c->decl.get();
    }
  }
  REQUIRE(grid_decl != nullptr);
  bool found_grid = false, found_p = false;
  for (const auto& d : grid_decl->declarators) {
    if (d.name == "grid") {
      found_grid = true;
      CHECK(d.array_dims == std::vector<std::string>{"4", "8"});
      CHECK(d.pointer_prefix.empty());
    }
    if (d.name == "p") {
      found_p = true;
      CHECK(d.pointer_prefix == "*");
    }
  }
  CHECK(found_grid);
  CHECK(found_p);
  REQUIRE(handler_decl != nullptr);
  CHECK(handler_decl->declarators.at(0).is_fn_pointer);
}

TEST_CASE("initializers are stripped from text_no_init") {
  std::string src = "int n = 42;\ndouble w[2] = {1.0, 2.0};\n";
  ParsedUnit unit = parse_unit(src);
  for (const auto& c : unit.root->children) {
    if (c->kind != NodeKind::Declaration || !c->decl) continue;
    for (const auto& d : c->decl->declarators) {
      CHECK(d.text_no_init.find('=') == std::string::npos);
      if (d.name == "w") CHECK(d.text_no_init == "w[2]");
    }
  }
}

TEST_CASE("pragma directives are statement-level nodes") {
  std::string src =
      "void f(double* a) {\n"
      "#pragma omp parallel for\n"
      "  for (int i = 0; i < 4; i++) a[i] = i;\n"
      "}\n";
  ParsedUnit unit = parse_unit(src);
  const AstNode* prag = first_of(*unit.root, NodeKind::PragmaDirective);
  REQUIRE(prag != nullptr);
  CHECK(std::string(prag->text).find("omp parallel for") != std::string::npos);
}

TEST_CASE("file-scope brace imbalance raises ParseError") {
  CHECK_THROWS_AS(parse_unit("void f() { int x = 1;\n"), ParseError);
}

TEST_CASE("function definitions expose parameter declarations") {
  std::string src = "long mix(int n, double *xs, char tag) { return n; }\n";
  ParsedUnit unit = parse_unit(src);
  const AstNode* fn = first_of(*unit.root, NodeKind::FunctionDef);
  REQUIRE(fn != nullptr);
  REQUIRE(fn->func != nullptr);
  CHECK(fn->name == "mix");
  REQUIRE(fn->func->params.size() == 3);
  CHECK(fn->func->params[0].dtor.name == "n");
  CHECK(fn->func->params[1].dtor.name == "xs");
  CHECK(fn->func->params[1].dtor.pointer_prefix == "*");
  CHECK(fn->func->params[2].specifiers == "char");
}
