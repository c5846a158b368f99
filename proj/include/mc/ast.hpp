#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mc/lexer.hpp"

namespace mc {

struct SourceSpan {
  int file_id = 0;
  size_t byte_start = 0;
  size_t byte_end = 0;  // exclusive
  int line_start = 1;
  int line_end = 1;

  bool contains(const SourceSpan& other) const {
    return byte_start <= other.byte_start && other.byte_end <= byte_end;
  }
  bool overlaps(const SourceSpan& other) const {
    return byte_start < other.byte_end && other.byte_start < byte_end;
  }
};

enum class NodeKind {
  TranslationUnit,
  FunctionDef,
  Declaration,
  ForStmt,
  WhileStmt,
  DoWhileStmt,
  IfStmt,
  CompoundStmt,
  ExprStmt,
  ReturnStmt,
  GotoStmt,
  LabelStmt,
  PragmaDirective,
  CallExpr,
  Identifier,
  Other,
};

inline const char* node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::TranslationUnit: return "TranslationUnit";
    case NodeKind::FunctionDef: return "FunctionDef";
    case NodeKind::Declaration: return "Declaration";
    case NodeKind::ForStmt: return "ForStmt";
    case NodeKind::WhileStmt: return "WhileStmt";
    case NodeKind::DoWhileStmt: return "DoWhileStmt";
    case NodeKind::IfStmt: return "IfStmt";
    case NodeKind::CompoundStmt: return "CompoundStmt";
    case NodeKind::ExprStmt: return "ExprStmt";
    case NodeKind::ReturnStmt: return "ReturnStmt";
    case NodeKind::GotoStmt: return "GotoStmt";
    case NodeKind::LabelStmt: return "LabelStmt";
    case NodeKind::PragmaDirective: return "PragmaDirective";
    case NodeKind::CallExpr: return "CallExpr";
    case NodeKind::Identifier: return "Identifier";
    case NodeKind::Other: return "Other";
  }
  return "?";
}

// One declarator out of a declaration: name plus the shape around it.
// `double *p[8]` -> name "p", pointer_prefix "*", array_dims {"8"}.
struct Declarator {
  std::string name;
  std::string pointer_prefix;           // "*", "**", "* const", ... or ""
  std::vector<std::string> array_dims;  // verbatim dimension expressions, may hold ""
  bool is_function = false;             // has a parameter list
  bool is_fn_pointer = false;           // grouped declarator with its own params
  std::string params_text;              // verbatim "(...)" contents for functions
  size_t name_byte = 0;                 // byte offset of the name token
  std::string text_no_init;             // declarator text with any initializer removed
};

struct DeclInfo {
  std::string specifiers;  // e.g. "const double", "struct pt"; storage class kept out
  bool is_static = false;
  bool is_extern = false;
  bool is_typedef = false;
  std::vector<Declarator> declarators;
  std::vector<std::string> enum_constants;  // names an enum body introduces
  std::string body_text;                    // verbatim struct/union/enum body incl. braces
};

struct ParamDecl {
  std::string specifiers;
  Declarator dtor;
  bool is_static = false;  // not meaningful for params; kept for symmetry
};

struct FuncInfo {
  std::string name;
  std::vector<ParamDecl> params;
  bool is_static = false;
  bool variadic = false;
  size_t proto_end = 0;  // byte just past the closing ')' of the parameter list
};

struct AstNode {
  NodeKind kind = NodeKind::Other;
  SourceSpan span;
  std::string_view text;  // verbatim slice for leaf / opaque nodes
  bool unsupported = false;
  std::string name;  // function / label / identifier / callee name
  std::vector<std::unique_ptr<AstNode>> children;
  std::unique_ptr<DeclInfo> decl;   // Declaration nodes
  std::unique_ptr<FuncInfo> func;   // FunctionDef nodes

  AstNode() = default;
  AstNode(const AstNode&) = delete;
  AstNode& operator=(const AstNode&) = delete;

  AstNode* add_child(std::unique_ptr<AstNode> child) {
    children.push_back(std::move(child));
    return children.back().get();
  }
};

// Token-level text equality: same token stream regardless of spacing.
inline bool token_equal(std::string_view a, std::string_view b) {
  auto ta = lex(a);
  auto tb = lex(b);
  if (ta.size() != tb.size()) return false;
  for (size_t i = 0; i < ta.size(); ++i) {
    if (ta[i].kind != tb[i].kind || ta[i].text != tb[i].text) return false;
  }
  return true;
}

// Structural tree equality used by the reparse round-trip checks.
inline bool structural_equal(const AstNode& a, const AstNode& b) {
  if (a.kind != b.kind || a.name != b.name || a.unsupported != b.unsupported)
    return false;
  if (a.children.size() != b.children.size()) return false;
  if (a.children.empty() && !token_equal(a.text, b.text)) return false;
  for (size_t i = 0; i < a.children.size(); ++i) {
    if (!structural_equal(*a.children[i], *b.children[i])) return false;
  }
  return true;
}

inline void walk(const AstNode& node, const std::function<void(const AstNode&)>& fn) {
  fn(node);
  for (const auto& c : node.children) walk(*c, fn);
}

}  // namespace mc
