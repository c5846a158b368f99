#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mc/ast.hpp"
#include "mc/common.hpp"
#include "mc/parser.hpp"

namespace mc {

enum class SymCategory {
  Local,
  Parameter,
  GlobalVar,
  StaticVar,
  Function,
  StaticFn,
  TypedefName,
};

inline const char* sym_category_name(SymCategory c) {
  switch (c) {
    case SymCategory::Local: return "local";
    case SymCategory::Parameter: return "parameter";
    case SymCategory::GlobalVar: return "global_var";
    case SymCategory::StaticVar: return "static_var";
    case SymCategory::Function: return "function";
    case SymCategory::StaticFn: return "static_fn";
    case SymCategory::TypedefName: return "typedef_name";
  }
  return "?";
}

struct SymbolInfo {
  std::string name;
  SymCategory category = SymCategory::Local;
  std::string specifiers;  // type text without storage class, e.g. "double"
  Declarator dtor;
  bool is_primitive = false;
  bool written = false;        // the variable's own value may change in the nest
  bool address_taken = false;
  bool defined_in_file = false;  // globals/functions: definition in this unit
  bool from_header = false;      // functions assumed declared by an #include
  const AstNode* decl_node = nullptr;

  // Display form, e.g. "double (*)[N]" for pointer-to-array shapes.
  std::string declared_type() const {
    std::string t = specifiers;
    if (!dtor.pointer_prefix.empty()) t += " " + dtor.pointer_prefix;
    for (const auto& d : dtor.array_dims) t += "[" + d + "]";
    return t;
  }
};

// An outermost for nest found in a function, before eligibility filtering.
struct NestCandidate {
  const AstNode* root = nullptr;      // the ForStmt
  const AstNode* fn = nullptr;        // enclosing FunctionDef
  std::string enclosing_fn;
  int ordinal = 0;                    // file-wide, source order
  std::vector<const AstNode*> omp_pragmas;  // attached run of preceding pragmas
};

inline bool is_omp_pragma_text(std::string_view text) {
  auto toks = lex(text);
  // "#pragma" directive token carries the whole line; inspect its words
  std::string s(text);
  auto words = split_ws(s);
  return words.size() >= 2 && starts_with(words[0], "#pragma") && words[1] == "omp";
}

// Procedure: find_for_nests. Outermost ForStmt nodes per function, ordinals
// file-wide in source order; a run of #pragma omp siblings immediately before
// a nest is attached to it.
inline std::vector<NestCandidate> find_for_nests(const ParsedUnit& unit) {
  std::vector<NestCandidate> out;
  int ordinal = 0;
  for (const auto& top : unit.root->children) {
    if (top->kind != NodeKind::FunctionDef) continue;
    // recursive scan that stops descending at ForStmt
    std::function<void(const AstNode&)> scan = [&](const AstNode& n) {
      for (size_t i = 0; i < n.children.size(); ++i) {
        const AstNode& c = *n.children[i];
        if (c.kind == NodeKind::ForStmt) {
          NestCandidate cand;
          cand.root = &c;
          cand.fn = top.get();
          cand.enclosing_fn = top->name;
          cand.ordinal = ordinal++;
          for (size_t j = i; j-- > 0;) {
            const AstNode& prev = *n.children[j];
            if (prev.kind == NodeKind::PragmaDirective &&
                is_omp_pragma_text(prev.text))
              cand.omp_pragmas.insert(cand.omp_pragmas.begin(), &prev);
            else
              break;
          }
          out.push_back(std::move(cand));
          continue;  // do not descend into the nest
        }
        scan(c);
      }
    };
    scan(*top);
  }
  return out;
}

// Full byte span of a nest including attached pragmas.
inline SourceSpan nest_full_span(const NestCandidate& nest) {
  SourceSpan s = nest.root->span;
  if (!nest.omp_pragmas.empty()) {
    s.byte_start = nest.omp_pragmas.front()->span.byte_start;
    s.line_start = nest.omp_pragmas.front()->span.line_start;
  }
  return s;
}

// ---- file-scope table ------------------------------------------------------

struct FileScopeEntry {
  SymCategory category = SymCategory::GlobalVar;
  std::string specifiers;
  Declarator dtor;
  bool is_definition = false;   // object with no `extern`, or function body
  const AstNode* node = nullptr;
  size_t proto_end = 0;         // FunctionDef only: byte after ')'
};

struct FileScope {
  std::map<std::string, FileScopeEntry> entries;
  std::set<std::string> threadprivate_names;
  bool has_includes = false;
};

inline std::vector<std::string> pragma_clause_vars(std::string_view pragma_text);

inline FileScope build_file_scope(const ParsedUnit& unit) {
  FileScope fsc;
  for (const auto& top : unit.root->children) {
    if (top->kind == NodeKind::Other && starts_with(trim(top->text), "#include"))
      fsc.has_includes = true;
    if (top->kind == NodeKind::PragmaDirective) {
      std::string t = trim(top->text);
      if (is_omp_pragma_text(t) && t.find("threadprivate") != std::string::npos)
        for (const auto& v : pragma_clause_vars(t)) fsc.threadprivate_names.insert(v);
      continue;
    }
    if (top->kind == NodeKind::FunctionDef && top->func) {
      FileScopeEntry e;
      e.category = top->func->is_static ? SymCategory::StaticFn : SymCategory::Function;
      e.is_definition = true;
      e.node = top.get();
      e.proto_end = top->func->proto_end;
      fsc.entries[top->func->name] = e;
      continue;
    }
    if (top->kind == NodeKind::Declaration && top->decl) {
      const DeclInfo& d = *top->decl;
      for (const auto& dtor : d.declarators) {
        FileScopeEntry e;
        e.specifiers = d.specifiers;
        e.dtor = dtor;
        e.node = top.get();
        if (d.is_typedef) {
          e.category = SymCategory::TypedefName;
        } else if (dtor.is_function) {
          e.category = d.is_static ? SymCategory::StaticFn : SymCategory::Function;
          e.is_definition = false;
        } else {
          e.category = d.is_static ? SymCategory::StaticVar : SymCategory::GlobalVar;
          e.is_definition = !d.is_extern;
        }
        // a later definition wins over an earlier extern/prototype
        auto it = fsc.entries.find(dtor.name);
        if (it == fsc.entries.end() || (!it->second.is_definition))
          fsc.entries[dtor.name] = e;
      }
    }
  }
  return fsc;
}

// ---- local scope along the path to a nest ---------------------------------

struct LocalEntry {
  SymCategory category = SymCategory::Local;
  std::string specifiers;
  Declarator dtor;
  const AstNode* node = nullptr;
};

inline bool find_path(const AstNode& from, const AstNode& target,
                      std::vector<const AstNode*>& path) {
  path.push_back(&from);
  if (&from == &target) return true;
  for (const auto& c : from.children)
    if (c->span.contains(target.span) || c.get() == &target)
      if (find_path(*c, target, path)) return true;
  path.pop_back();
  return false;
}

// Locals visible at the nest: function parameters plus declarations that
// appear before the nest inside compounds on the ancestor chain.
inline std::map<std::string, LocalEntry> visible_locals(const NestCandidate& nest) {
  std::map<std::string, LocalEntry> out;
  if (nest.fn->func) {
    for (const auto& p : nest.fn->func->params) {
      LocalEntry e;
      e.category = SymCategory::Parameter;
      e.specifiers = p.specifiers;
      e.dtor = p.dtor;
      out[p.dtor.name] = e;
    }
  }
  std::vector<const AstNode*> path;
  if (!find_path(*nest.fn, *nest.root, path)) return out;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const AstNode* scope = path[i];
    const AstNode* next = path[i + 1];
    for (const auto& c : scope->children) {
      if (c.get() == next) break;
      if (c->kind == NodeKind::Declaration && c->decl && !c->decl->is_typedef) {
        for (const auto& dtor : c->decl->declarators) {
          LocalEntry e;
          e.category = c->decl->is_static ? SymCategory::StaticVar : SymCategory::Local;
          e.specifiers = c->decl->specifiers;
          e.dtor = dtor;
          e.node = c.get();
          out[dtor.name] = e;
        }
      }
    }
  }
  return out;
}

// ---- pragma clause scanning -------------------------------------------------

// Extracts variable names referenced by OpenMP clause argument lists.
inline std::vector<std::string> pragma_clause_vars(std::string_view pragma_text) {
  static const std::set<std::string> var_clauses = {
      "private",  "firstprivate", "lastprivate", "shared",     "reduction",
      "linear",   "copyin",       "copyprivate", "threadprivate", "if",
      "num_threads", "final",
  };
  static const std::set<std::string> non_vars = {
      "static", "dynamic", "guided", "runtime", "auto", "none", "max", "min",
  };
  std::vector<std::string> out;
  // the whole pragma is one Directive token; re-lex its text without '#'
  std::string body(pragma_text);
  if (!body.empty() && body[0] == '#') body = body.substr(1);
  auto toks = lex(body);
  for (size_t i = 0; i + 1 < toks.size(); ++i) {
    if (toks[i].kind != Tok::Ident) continue;
    std::string clause(toks[i].text);
    if (!var_clauses.count(clause)) continue;
    if (toks[i + 1].kind != Tok::Punct || toks[i + 1].text != "(") continue;
    int depth = 0;
    size_t j = i + 1;
    bool past_colon = clause != "reduction";  // reduction(<op>: list)
    for (; j < toks.size(); ++j) {
      if (toks[j].kind == Tok::Punct && toks[j].text == "(") { ++depth; continue; }
      if (toks[j].kind == Tok::Punct && toks[j].text == ")") {
        if (--depth == 0) break;
        continue;
      }
      if (toks[j].kind == Tok::Punct && toks[j].text == ":") { past_colon = true; continue; }
      if (!past_colon) continue;
      if (toks[j].kind == Tok::Ident && !is_c_keyword(toks[j].text) &&
          !non_vars.count(std::string(toks[j].text)))
        out.push_back(std::string(toks[j].text));
    }
    i = j;
  }
  return out;
}

// ---- write / address-taken analysis ----------------------------------------

inline bool is_assign_op(std::string_view t) {
  static const std::set<std::string_view> ops = {
      "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>="};
  return ops.count(t) > 0;
}

// Token-level scan marking symbols whose own value may change inside
// [first, last) of the unit's token stream. A postfix chain starting with
// '[' or '->' writes through aliased caller memory, which needs no copy-out;
// a chain starting with '.' mutates a localized struct copy, which does.
inline void mark_writes(const ParsedUnit& unit, size_t first, size_t last,
                        std::map<std::string, SymbolInfo*>& syms) {
  const auto& T = unit.tokens;
  auto sym_at = [&](size_t i) -> SymbolInfo* {
    if (T[i].kind != Tok::Ident || is_c_keyword(T[i].text)) return nullptr;
    auto it = syms.find(std::string(T[i].text));
    return it == syms.end() ? nullptr : it->second;
  };
  for (size_t i = first; i < last; ++i) {
    SymbolInfo* s = sym_at(i);
    if (!s) continue;
    // member accesses are not base symbols
    if (i > first && T[i - 1].kind == Tok::Punct &&
        (T[i - 1].text == "." || T[i - 1].text == "->"))
      continue;
    // walk the postfix chain
    size_t j = i + 1;
    std::string first_step;
    while (j < last) {
      if (T[j].kind == Tok::Punct && T[j].text == "[") {
        if (first_step.empty()) first_step = "[";
        int depth = 0;
        while (j < last) {
          if (T[j].kind == Tok::Punct && T[j].text == "[") ++depth;
          if (T[j].kind == Tok::Punct && T[j].text == "]" && --depth == 0) { ++j; break; }
          ++j;
        }
        continue;
      }
      if (T[j].kind == Tok::Punct && (T[j].text == "." || T[j].text == "->")) {
        if (first_step.empty()) first_step = std::string(T[j].text);
        j += 2;  // op + member name
        continue;
      }
      break;
    }
    bool base_mutates = first_step.empty() || first_step == ".";
    // assignment or in/decrement after the chain
    if (j < last && T[j].kind == Tok::Punct &&
        (is_assign_op(T[j].text) || T[j].text == "++" || T[j].text == "--")) {
      if (base_mutates) s->written = true;
    }
    // prefix in/decrement
    if (i > first && T[i - 1].kind == Tok::Punct &&
        (T[i - 1].text == "++" || T[i - 1].text == "--")) {
      if (base_mutates) s->written = true;
    }
    // unary address-of: '&' whose left neighbor cannot end an expression
    if (i > first && T[i - 1].kind == Tok::Punct && T[i - 1].text == "&") {
      bool binary = false;
      if (i >= 2) {
        const Token& before = T[i - 2];
        if (before.kind == Tok::Ident && !is_c_keyword(before.text)) binary = true;
        if (before.kind == Tok::Number) binary = true;
        if (before.kind == Tok::Punct && (before.text == ")" || before.text == "]"))
          binary = true;
      }
      if (!binary && base_mutates) {
        s->address_taken = true;
        s->written = true;  // callee may store through the pointer
      }
    }
  }
}

// ---- reference collection ----------------------------------------------------

struct CollectResult {
  std::vector<SymbolInfo> symbols;   // first-use order
  std::vector<std::string> unknown;  // unresolved identifiers
  bool used_static = false;
};

inline std::pair<size_t, size_t> token_range_of_span(const ParsedUnit& unit,
                                                     const SourceSpan& span) {
  size_t first = unit.tokens.size(), last = 0;
  for (size_t i = 0; i < unit.tokens.size(); ++i) {
    const Token& t = unit.tokens[i];
    if (t.byte >= span.byte_start && t.end <= span.byte_end) {
      first = std::min(first, i);
      last = std::max(last, i + 1);
    }
  }
  if (first > last) first = last;
  return {first, last};
}

// Names declared by Declaration nodes inside the nest (for-init included).
inline std::set<std::string> names_declared_inside(const AstNode& nest_root) {
  std::set<std::string> out;
  walk(nest_root, [&](const AstNode& n) {
    if (n.kind == NodeKind::Declaration && n.decl)
      for (const auto& d : n.decl->declarators) out.insert(d.name);
    if (n.kind == NodeKind::LabelStmt && !n.name.empty()) out.insert(n.name);
  });
  return out;
}

// Procedure: collect_symbols. Every identifier referenced in the nest that is
// declared outside it, classified; declarations inside the nest excluded.
inline CollectResult collect_symbols(const ParsedUnit& unit, const FileScope& fsc,
                                     const NestCandidate& nest) {
  CollectResult res;
  std::set<std::string> inside = names_declared_inside(*nest.root);
  std::map<std::string, LocalEntry> locals = visible_locals(nest);

  std::map<std::string, size_t> index_of;
  auto add_ref = [&](const std::string& name, bool is_call) {
    if (inside.count(name)) return;
    if (unit.macro_names.count(name) || unit.enum_constants.count(name)) return;
    if (index_of.count(name)) return;
    SymbolInfo s;
    s.name = name;
    auto lit = locals.find(name);
    if (lit != locals.end()) {
      s.category = lit->second.category;
      s.specifiers = lit->second.specifiers;
      s.dtor = lit->second.dtor;
      s.decl_node = lit->second.node;
    } else if (auto fit = fsc.entries.find(name); fit != fsc.entries.end()) {
      s.category = fit->second.category;
      s.specifiers = fit->second.specifiers;
      s.dtor = fit->second.dtor;
      s.defined_in_file = fit->second.is_definition;
      s.decl_node = fit->second.node;
    } else if (unit.typedef_names.count(name) || builtin_typedefs().count(name)) {
      s.category = SymCategory::TypedefName;
    } else if (is_call && fsc.has_includes) {
      s.category = SymCategory::Function;
      s.from_header = true;
    } else {
      res.unknown.push_back(name);
      return;
    }
    if (s.category == SymCategory::StaticVar || s.category == SymCategory::StaticFn)
      res.used_static = true;
    bool arith = false;
    {
      auto stoks = lex(s.specifiers);
      for (const auto& t : stoks)
        if (t.kind == Tok::Ident &&
            (is_arith_keyword(t.text) ||
             (builtin_typedefs().count(std::string(t.text)) &&
              builtin_typedefs().at(std::string(t.text)))))
          arith = true;
    }
    size_t stars = std::count(s.dtor.pointer_prefix.begin(),
                              s.dtor.pointer_prefix.end(), '*');
    s.is_primitive = arith && s.dtor.array_dims.empty() && stars <= 1;
    index_of[name] = res.symbols.size();
    res.symbols.push_back(std::move(s));
  };

  walk(*nest.root, [&](const AstNode& n) {
    if (n.kind == NodeKind::Identifier) add_ref(n.name, false);
    if (n.kind == NodeKind::CallExpr) add_ref(n.name, true);
    if (n.kind == NodeKind::PragmaDirective)
      for (const auto& v : pragma_clause_vars(n.text)) add_ref(v, false);
  });
  for (const AstNode* p : nest.omp_pragmas)
    for (const auto& v : pragma_clause_vars(p->text)) add_ref(v, false);

  // array dimensions of referenced symbols may themselves reference symbols
  for (size_t i = 0; i < res.symbols.size(); ++i) {
    auto dims = res.symbols[i].dtor.array_dims;  // copy: res.symbols grows
    for (const auto& dim : dims) {
      for (const auto& t : lex(dim))
        if (t.kind == Tok::Ident && !is_c_keyword(t.text))
          add_ref(std::string(t.text), false);
    }
  }

  auto [first, last] = token_range_of_span(unit, nest.root->span);
  std::map<std::string, SymbolInfo*> by_name;
  for (auto& s : res.symbols) by_name[s.name] = &s;
  mark_writes(unit, first, last, by_name);
  return res;
}

}  // namespace mc
