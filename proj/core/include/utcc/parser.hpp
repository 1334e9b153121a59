#pragma once

/*
 * Parser for the .utcc program format and for constraint text.
 *
 * Programs are parsed in two phases: the source phase keeps constraints
 * and call arguments as raw text, and binding resolves them against a
 * concrete constraint system (whose signature decides which identifiers
 * are variables). Replication !P is desugared at bind time into a fresh
 * next-guarded declaration.
 *
 *   file    := { pragma } { decl } process
 *   pragma  := "const" idlist "." | "pool" idlist "."
 *            | "fun" id "/" nat { "," id "/" nat } "."
 *            | "pred" id "/" nat { "," id "/" nat } "."
 *   decl    := id "(" [ idlist ] ")" "=" process ";"
 *   process := prefix { "||" prefix }
 *   prefix  := "skip" | "tell" "(" constraint ")"
 *            | "when" constraint "do" prefix
 *            | "abs" "(" idlist ";" constraint ")" "do" prefix
 *            | "local" idlist "." "(" process ")"
 *            | "next" prefix | "unless" constraint "next" prefix
 *            | "!" prefix | id "(" [ termlist ] ")" | "(" process ")"
 *
 * Constraint text over equation systems:
 *
 *   constraint := atom { "/\" atom }
 *   atom       := "true" | "false" | "exists" idlist "." "(" constraint ")"
 *              | term "=" term | pred "(" termlist ")"
 *   term       := id | id "(" termlist ")" | "[" "]"
 *              | "[" term { "," term } [ "|" term ] "]"
 *
 * Identifiers starting with "_" are reserved for renaming apart.
 * Line comments start with "//".
 */

#include <memory>
#include <string>
#include <vector>

#include "utcc/ast.hpp"
#include "utcc/formula.hpp"

namespace utcc {

struct SourceProcess;
using SourceProcessPtr = std::shared_ptr<SourceProcess>;

struct SourceProcess {
  ProcKind kind;
  bool bang = false;  // marks !P nodes (kind is the child's kind holder)
  std::string constraint_text;
  std::vector<std::string> binders;
  std::vector<SourceProcessPtr> children;
  std::string callee;
  std::vector<std::string> arg_texts;
};

struct ProgramSource {
  Signature signature;             // from const/fun/pred pragmas
  std::vector<std::string> pool;   // from the pool pragma
  std::vector<std::string> globals;  // from the global pragma
  std::vector<std::pair<std::string, std::vector<std::string>>> decl_heads;
  std::vector<SourceProcessPtr> decl_bodies;
  SourceProcessPtr main;
};

ProgramSource parse_program_source(const std::string& text);
ProgramSource parse_program_file(const std::string& path);

// Resolves constraint text and call arguments against `sys`; desugars
// replication; checks well-formedness (fv containment, guarded recursion).
Program bind_program(const ProgramSource& src, const ConstraintSystem& sys);

RawFormula parse_raw_formula(const std::string& text, const Signature& sig);
Term parse_term(const std::string& text, const Signature& sig);
TermVec parse_term_list(const std::string& text, const Signature& sig);

// Splits "<left, right>" at the top-level comma (for pair-shaped
// constraint systems). Throws ParseError when the shape is wrong.
std::pair<std::string, std::string> split_angle_pair(const std::string& text);

// Positive propositional formulas (the Pos groundness domain):
//   phi := iff ; iff := or { "<->" or } ; or := and { "\/" and }
//   and := prim { "/\" prim } ; prim := "true" | "false" | var | "(" phi ")"
struct PosExpr {
  enum class Kind { True, False, Var, And, Or, Iff };
  Kind kind;
  std::string var;
  std::vector<PosExpr> children;
};
PosExpr parse_pos_expr(const std::string& text);

// "true" or a /\-separated list of atoms name(arg,...) with variable
// arguments; arities are free (used by the type-dependency domain).
std::vector<PredAtom> parse_simple_atoms(const std::string& text);

}  // namespace utcc
