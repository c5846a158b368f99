#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mc/analyze.hpp"
#include "mc/common.hpp"
#include "mc/parser.hpp"
#include "mc/strutil.hpp"

namespace mc {

// An identified for nest with identity, span and referenced-symbol sets.
struct LoopNest {
  std::string loop_id;  // "<file-stem>_<function>_L<ordinal>"
  SourceSpan span;      // full span including attached pragmas
  std::string enclosing_fn;
  std::vector<SymbolInfo> symbols;
  bool eligible = true;
  std::vector<std::string> ineligibility_reasons;
  std::string omp_pragma;  // verbatim attached pragma text, "" when none

  const AstNode* root = nullptr;
  const AstNode* fn = nullptr;
  std::vector<const AstNode*> omp_pragma_nodes;
  std::vector<std::string> unknown_symbols;
};

struct ParamSpec {
  std::string name;
  std::string type_text;   // parameter declaration text, e.g. "double *A_mc"
  bool by_ref = true;
  bool is_array = false;
  std::string elem_type;   // arrays: element type text
  std::vector<std::string> dims;
  bool localized = false;  // copy-in (and copy-out when written)
  bool written = false;
  std::string specifiers;
  std::string pointer_prefix;
};

struct ExtractedFunctionSig {
  std::string fn_name;  // "mc_loop_<loop_id>"
  std::vector<ParamSpec> params;
  std::vector<std::string> localized;
  std::string prototype;  // "void mc_loop_x(int *n_mc, double *A_mc)"
  std::string call_text;  // "mc_loop_x(&n, (double *)A);"
  std::vector<std::string> extern_global_names;
};

struct LoopVariants {
  std::string clean;
  std::string timed;
  std::string energized;
};

struct GeneratedArtifacts {
  std::string base_file;
  std::map<std::string, LoopVariants> loop_files;
  std::vector<std::string> extern_decls;  // prototypes added to the base file
};

// ---- eligibility ------------------------------------------------------------

struct EligibilityConfig {
  int min_loop_lines = 0;  // 0 disables the threshold
};

// Procedure: check_eligibility. Reason tags in fixed order; empty = eligible.
inline std::vector<std::string> check_eligibility(const ParsedUnit& unit,
                                                  const FileScope& fsc,
                                                  const NestCandidate& cand,
                                                  const CollectResult& syms,
                                                  const EligibilityConfig& cfg) {
  (void)unit;
  std::vector<std::string> reasons;
  bool unsupported = false, has_return = false, has_goto = false;
  walk(*cand.root, [&](const AstNode& n) {
    if (n.unsupported) unsupported = true;
    if (n.kind == NodeKind::ReturnStmt) has_return = true;
    if (n.kind == NodeKind::GotoStmt || n.kind == NodeKind::LabelStmt) has_goto = true;
  });
  if (has_return) reasons.push_back("has_return");
  if (has_goto) reasons.push_back("has_goto");
  bool static_fn = false, static_var = false, threadpriv = false;
  for (const auto& s : syms.symbols) {
    if (s.category == SymCategory::StaticFn) static_fn = true;
    if (s.category == SymCategory::StaticVar) static_var = true;
    if (fsc.threadprivate_names.count(s.name)) threadpriv = true;
  }
  if (static_fn) reasons.push_back("uses_static_fn");
  if (static_var) reasons.push_back("uses_static_var");
  if (unsupported) reasons.push_back("unsupported_construct");
  if (!syms.unknown.empty()) reasons.push_back("unknown_symbol");
  if (threadpriv) reasons.push_back("threadprivate");
  if (cfg.min_loop_lines > 0) {
    int lines = cand.root->span.line_end - cand.root->span.line_start + 1;
    if (lines < cfg.min_loop_lines) reasons.push_back("below_min_lines");
  }
  return reasons;
}

// Identifies all nests in a unit and computes eligibility.
inline std::vector<LoopNest> analyze_unit(const ParsedUnit& unit,
                                          const std::string& file_stem,
                                          const EligibilityConfig& cfg = {}) {
  FileScope fsc = build_file_scope(unit);
  std::vector<LoopNest> out;
  std::string stem = sanitize_ident(file_stem);
  for (const auto& cand : find_for_nests(unit)) {
    LoopNest nest;
    nest.loop_id = stem + "_" + sanitize_ident(cand.enclosing_fn) + "_L" +
                   std::to_string(cand.ordinal);
    nest.span = nest_full_span(cand);
    nest.enclosing_fn = cand.enclosing_fn;
    nest.root = cand.root;
    nest.fn = cand.fn;
    nest.omp_pragma_nodes = cand.omp_pragmas;
    {
      std::vector<std::string> texts;
      for (const AstNode* p : cand.omp_pragmas) texts.push_back(std::string(trim(p->text)));
      nest.omp_pragma = join(texts, "\n");
    }
    CollectResult syms = collect_symbols(unit, fsc, cand);
    nest.symbols = syms.symbols;
    nest.unknown_symbols = syms.unknown;
    nest.ineligibility_reasons = check_eligibility(unit, fsc, cand, syms, cfg);
    nest.eligible = nest.ineligibility_reasons.empty();
    out.push_back(std::move(nest));
  }
  return out;
}

// ---- signature construction ---------------------------------------------------

inline std::string compose_param(const ParamSpec& p) { return p.type_text; }

// Builds the parameter/call scheme for one nest. Arrays travel as flat
// element pointers (re-shaped inside with an alias), everything else as a
// pointer to the original object with a same-named local copy.
inline ExtractedFunctionSig build_signature(const LoopNest& nest) {
  ExtractedFunctionSig sig;
  sig.fn_name = "mc_loop_" + nest.loop_id;
  std::vector<std::string> call_args;
  for (const auto& s : nest.symbols) {
    bool as_param = false;
    switch (s.category) {
      case SymCategory::Local:
      case SymCategory::Parameter:
        as_param = true;
        break;
      case SymCategory::GlobalVar:
        // same-file non-static definitions stay extern-accessed; globals
        // defined elsewhere are passed by reference when written
        as_param = s.written && !s.defined_in_file;
        if (!as_param) sig.extern_global_names.push_back(s.name);
        break;
      default:
        break;  // functions, typedefs: handled via extern decls / includes
    }
    if (!as_param) continue;
    if (s.dtor.is_fn_pointer)
      throw ExtractionFault("function-pointer symbol '" + s.name +
                            "' cannot be regenerated");
    if (s.specifiers.empty())
      throw ExtractionFault("no type text for symbol '" + s.name + "'");
    ParamSpec p;
    p.name = s.name;
    p.written = s.written;
    p.specifiers = s.specifiers;
    p.pointer_prefix = s.dtor.pointer_prefix;
    if (!s.dtor.array_dims.empty()) {
      p.is_array = true;
      p.dims = s.dtor.array_dims;
      p.elem_type = s.specifiers + (s.dtor.pointer_prefix.empty()
                                        ? ""
                                        : " " + s.dtor.pointer_prefix);
      p.type_text = p.elem_type + " *" + p.name + "_mc";
      call_args.push_back(p.dims.size() > 1 ? "(" + p.elem_type + " *)" + p.name
                                            : p.name);
    } else {
      p.localized = true;
      std::string stars = s.dtor.pointer_prefix;
      p.type_text = s.specifiers + " " + (stars.empty() ? "" : stars) + "*" +
                    p.name + "_mc";
      call_args.push_back("&" + p.name);
      sig.localized.push_back(p.name);
    }
    sig.params.push_back(std::move(p));
  }
  std::vector<std::string> decls;
  for (const auto& p : sig.params) decls.push_back(compose_param(p));
  sig.prototype = "void " + sig.fn_name + "(" +
                  (decls.empty() ? "void" : join(decls, ", ")) + ")";
  sig.call_text = sig.fn_name + "(" + join(call_args, ", ") + ");";
  return sig;
}

// ---- pragma sanitization -------------------------------------------------------

// Regenerates an OpenMP pragma keeping only clause variables visible in the
// extracted function scope; clauses whose variable lists empty out are dropped.
inline std::string sanitize_pragma(const std::string& pragma_text,
                                   const std::set<std::string>& visible) {
  static const std::set<std::string> list_clauses = {
      "private", "firstprivate", "lastprivate", "shared", "copyin",
      "copyprivate", "linear"};
  std::string body = pragma_text;
  if (!body.empty() && body[0] == '#') body = body.substr(1);
  auto toks = lex(body);
  std::string out = "#pragma";
  auto append_word = [&](std::string_view w) {
    if (!out.empty() && out.back() != '(') out += " ";
    out += std::string(w);
  };
  size_t i = 0;
  // skip the "pragma" word itself
  if (i < toks.size() && toks[i].kind == Tok::Ident && toks[i].text == "pragma") ++i;
  while (i < toks.size() && toks[i].kind != Tok::Eof) {
    const Token& t = toks[i];
    bool is_list_clause =
        t.kind == Tok::Ident && list_clauses.count(std::string(t.text)) &&
        i + 1 < toks.size() && toks[i + 1].kind == Tok::Punct &&
        toks[i + 1].text == "(";
    bool is_reduction = t.kind == Tok::Ident && t.text == "reduction" &&
                        i + 1 < toks.size() && toks[i + 1].kind == Tok::Punct &&
                        toks[i + 1].text == "(";
    if (is_list_clause || is_reduction) {
      std::string clause(t.text);
      size_t j = i + 1;
      int depth = 0;
      std::string prefix;  // reduction "<op>:" part, verbatim
      std::vector<std::string> vars;
      bool in_prefix = is_reduction;
      for (; j < toks.size(); ++j) {
        if (toks[j].kind == Tok::Punct && toks[j].text == "(") {
          if (depth++ == 0) continue;
        }
        if (toks[j].kind == Tok::Punct && toks[j].text == ")") {
          if (--depth == 0) { ++j; break; }
        }
        if (in_prefix) {
          if (toks[j].kind == Tok::Punct && toks[j].text == ":") {
            prefix += ":";
            in_prefix = false;
          } else {
            prefix += std::string(toks[j].text);
          }
          continue;
        }
        if (toks[j].kind == Tok::Ident && !is_c_keyword(toks[j].text))
          vars.push_back(std::string(toks[j].text));
      }
      std::vector<std::string> kept;
      for (const auto& v : vars)
        if (visible.count(v)) kept.push_back(v);
      if (!kept.empty()) append_word(clause + "(" + prefix + join(kept, ",") + ")");
      i = j;
      continue;
    }
    // verbatim copy for everything else, with paren groups glued
    if (t.kind == Tok::Punct && t.text == "(") {
      int depth = 0;
      std::string group;
      for (; i < toks.size(); ++i) {
        if (toks[i].kind == Tok::Punct && toks[i].text == "(") ++depth;
        if (toks[i].kind == Tok::Punct && toks[i].text == ")") --depth;
        group += std::string(toks[i].text);
        if (depth == 0) { ++i; break; }
      }
      out += group;
      continue;
    }
    append_word(t.text);
    ++i;
  }
  return out;
}

// ---- loop file assembly ----------------------------------------------------------

inline bool is_directive_top(const AstNode& n) {
  return (n.kind == NodeKind::Other || n.kind == NodeKind::PragmaDirective) &&
         starts_with(trim(n.text), "#");
}

// Function prototype text regenerated from a definition: specifiers through ')'.
inline std::string prototype_of_definition(const ParsedUnit& unit, const AstNode& fn) {
  size_t start = fn.span.byte_start;
  size_t end = fn.func ? fn.func->proto_end : fn.span.byte_start;
  if (end <= start) throw ExtractionFault("cannot recover prototype for " + fn.name);
  return std::string(std::string_view(unit.source).substr(start, end - start));
}

// Procedure: extract_loop. Emits the self-contained clean loop file and the
// signature used for the base-file call.
inline std::pair<std::string, ExtractedFunctionSig> extract_loop(
    const ParsedUnit& unit, const FileScope& fsc, const LoopNest& nest) {
  (void)fsc;
  ExtractedFunctionSig sig = build_signature(nest);

  std::set<std::string> param_names;
  for (const auto& p : sig.params) param_names.insert(p.name);
  std::set<std::string> extern_names(sig.extern_global_names.begin(),
                                     sig.extern_global_names.end());
  std::set<std::string> called_fns;
  for (const auto& s : nest.symbols)
    if (s.category == SymCategory::Function && !s.from_header)
      called_fns.insert(s.name);

  std::string out;
  // top-level items in source order, filtered to what the loop file needs
  for (const auto& top : unit.root->children) {
    if (is_directive_top(*top)) {
      std::string t(trim(top->text));
      if (starts_with(t, "#pragma") && is_omp_pragma_text(t)) continue;
      out += t;
      out += "\n";
      continue;
    }
    if (top->kind == NodeKind::Declaration && top->decl) {
      const DeclInfo& d = *top->decl;
      if (d.is_typedef) {
        out += std::string(trim(top->text));
        out += "\n";
        continue;
      }
      // bare tag definitions travel verbatim; tag-plus-declarator forms emit
      // the tag part, then referenced declarators as externs below
      if (!d.body_text.empty()) {
        if (d.declarators.empty()) {
          out += std::string(trim(top->text));
          out += "\n";
        } else {
          out += d.specifiers + " " + d.body_text + ";\n";
        }
        if (d.declarators.empty()) continue;
      }
      for (const auto& dtor : d.declarators) {
        if (dtor.is_function) {
          if (!d.is_static) {
            out += d.specifiers + " " + dtor.text_no_init + ";\n";
          }
          continue;
        }
        if (extern_names.count(dtor.name)) {
          auto words = split_ws(d.specifiers);
          if (words.empty() || words.back() == "struct" || words.back() == "union" ||
              words.back() == "enum")
            throw ExtractionFault("global " + dtor.name +
                                  " has no regenerable type name");
          out += "extern " + d.specifiers + " " + dtor.text_no_init + ";\n";
        }
      }
      continue;
    }
    if (top->kind == NodeKind::FunctionDef && top->func) {
      if (called_fns.count(top->name))
        out += prototype_of_definition(unit, *top) + ";\n";
      continue;
    }
  }

  // the loop function itself
  out += "\n" + sig.prototype + " {\n";
  for (const auto& p : sig.params) {
    if (!p.is_array)
      out += "  " + p.specifiers + " " +
             (p.pointer_prefix.empty() ? "" : p.pointer_prefix) + p.name +
             " = *" + p.name + "_mc;\n";
  }
  for (const auto& p : sig.params) {
    if (!p.is_array) continue;
    if (p.dims.size() <= 1) {
      out += "  " + p.elem_type + " *" + p.name + " = " + p.name + "_mc;\n";
    } else {
      std::string shape;
      for (size_t i = 1; i < p.dims.size(); ++i) shape += "[" + p.dims[i] + "]";
      out += "  " + p.elem_type + " (*" + p.name + ")" + shape + " = (" +
             p.elem_type + " (*)" + shape + ")" + p.name + "_mc;\n";
    }
  }
  std::set<std::string> visible = param_names;
  visible.insert(extern_names.begin(), extern_names.end());
  for (const AstNode* prag : nest.omp_pragma_nodes)
    out += "  " + sanitize_pragma(std::string(trim(prag->text)), visible) + "\n";
  out += "  " + std::string(trim(nest.root->text)) + "\n";
  for (const auto& p : sig.params)
    if (!p.is_array && p.written)
      out += "  *" + p.name + "_mc = " + p.name + ";\n";
  out += "}\n";
  return {out, sig};
}

// Procedure: rewrite_base. Replaces eligible nest spans with calls, inserts
// the extern prototype block once, leaves every other byte untouched.
inline std::string rewrite_base(const ParsedUnit& unit,
                                const std::vector<LoopNest>& nests,
                                const std::vector<ExtractedFunctionSig>& sigs,
                                std::vector<std::string>* extern_decls_out = nullptr) {
  struct Splice {
    size_t start, end;
    std::string text;
  };
  std::vector<Splice> splices;
  std::vector<std::string> protos;
  size_t proto_insert_at = std::string::npos;
  size_t si = 0;
  for (size_t i = 0; i < nests.size(); ++i) {
    if (!nests[i].eligible) continue;
    const ExtractedFunctionSig& sig = sigs[si++];
    splices.push_back({nests[i].span.byte_start, nests[i].span.byte_end,
                       sig.call_text});
    protos.push_back("extern " + sig.prototype + ";");
    if (proto_insert_at == std::string::npos && nests[i].fn)
      proto_insert_at = nests[i].fn->span.byte_start;
  }
  if (extern_decls_out) *extern_decls_out = protos;
  if (splices.empty()) return unit.source;
  if (proto_insert_at != std::string::npos)
    splices.push_back({proto_insert_at, proto_insert_at, join(protos, "\n") + "\n"});
  std::sort(splices.begin(), splices.end(),
            [](const Splice& a, const Splice& b) { return a.start < b.start; });
  std::string out;
  size_t cursor = 0;
  for (const auto& s : splices) {
    out += unit.source.substr(cursor, s.start - cursor);
    out += s.text;
    cursor = s.end;
  }
  out += unit.source.substr(cursor);
  return out;
}

// ---- instrumentation ---------------------------------------------------------------

// Re-parses the clean loop file and wraps its single outermost nest.
// pre_lines/post_lines surround the nest (pragmas included); include_line is
// prepended to the file.
inline std::string wrap_nest(const std::string& clean, const std::string& include_line,
                             const std::vector<std::string>& pre_lines,
                             const std::vector<std::string>& post_lines) {
  ParsedUnit u = parse_unit(clean, 0);
  auto nests = find_for_nests(u);
  if (nests.empty()) throw ExtractionFault("no nest found in loop file");
  SourceSpan span = nest_full_span(nests.front());
  // pure insertions: original bytes stay put, so a line diff shows only the
  // inserted statements and the include
  std::string pre = join(pre_lines, "\n  ") + "\n  ";
  std::string post = "\n  " + join(post_lines, "\n  ");
  std::string out = include_line + "\n";
  out += clean.substr(0, span.byte_start);
  out += pre;
  out += clean.substr(span.byte_start, span.byte_end - span.byte_start);
  out += post;
  out += clean.substr(span.byte_end);
  return out;
}

// Procedure: instrument_timing. Monotonic clock reads around the nest plus an
// accumulate-and-report call; exactly 4 statements and 1 include added.
inline std::string instrument_timing(const std::string& loop_file_clean,
                                     const std::string& loop_id) {
  return wrap_nest(loop_file_clean, "#include \"mc_profile.h\"",
                   {"struct timespec mc_t0, mc_t1;",
                    "clock_gettime(CLOCK_MONOTONIC, &mc_t0);"},
                   {"clock_gettime(CLOCK_MONOTONIC, &mc_t1);",
                    "mc_profile_record(\"" + loop_id + "\", &mc_t0, &mc_t1);"});
}

// Procedure: instrument_energy. INIT/START before the nest, STOP/CLOSE after.
inline std::string instrument_energy(const std::string& loop_file_clean,
                                     const std::string& loop_id) {
  return wrap_nest(loop_file_clean, "#include \"mc_markers.h\"",
                   {"MC_MARKER_INIT;", "MC_MARKER_START(\"" + loop_id + "\");"},
                   {"MC_MARKER_STOP(\"" + loop_id + "\");", "MC_MARKER_CLOSE;"});
}

// ---- one-call generation ---------------------------------------------------------

struct FileArtifacts {
  std::vector<LoopNest> nests;            // all nests, post-demotion eligibility
  std::vector<ExtractedFunctionSig> sigs; // one per eligible nest, in order
  GeneratedArtifacts artifacts;
};

// Runs analyze → extract (demoting faulting nests) → variant instrumentation →
// base rewrite for one parsed unit.
inline FileArtifacts generate_artifacts(const ParsedUnit& unit,
                                        const std::string& file_stem,
                                        const EligibilityConfig& cfg = {},
                                        Diag* diag = nullptr) {
  FileArtifacts out;
  FileScope fsc = build_file_scope(unit);
  out.nests = analyze_unit(unit, file_stem, cfg);
  for (auto& nest : out.nests) {
    if (!nest.eligible) continue;
    try {
      auto [clean, sig] = extract_loop(unit, fsc, nest);
      LoopVariants v;
      v.clean = clean;
      v.timed = instrument_timing(clean, nest.loop_id);
      v.energized = instrument_energy(clean, nest.loop_id);
      out.artifacts.loop_files[nest.loop_id] = std::move(v);
      out.sigs.push_back(std::move(sig));
    } catch (const Error& e) {
      nest.eligible = false;
      nest.ineligibility_reasons.push_back("extraction_fault");
      (diag ? *diag : Diag::global())
          .warn("loop " + nest.loop_id + " demoted: " + e.what());
    }
  }
  out.artifacts.base_file =
      rewrite_base(unit, out.nests, out.sigs, &out.artifacts.extern_decls);
  return out;
}

}  // namespace mc
