#pragma once

/*
 * Abstract syntax for tccp/utcc processes and programs. Processes are
 * immutable trees; an ask `when c do P` is the abstraction with an empty
 * binder list. The diagonal set E of an abstraction is empty in source
 * programs and only populated by the operational semantics.
 */

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "utcc/constraint.hpp"

namespace utcc {

enum class ProcKind { Skip, Tell, Abs, Par, Local, Next, Unless, Call };

class Process {
 public:
  Process() = default;

  static Process skip();
  static Process tell(Constraint c);
  static Process ask(Constraint c, Process body);  // Abs with no binders
  static Process abs(std::vector<std::string> binders, Constraint guard, Process body);
  static Process abs_with_seen(std::vector<std::string> binders, Constraint guard,
                               std::vector<Constraint> seen, Process body);
  static Process par(std::vector<Process> children);
  static Process local(std::vector<std::string> vars, Process body);
  static Process next(Process body);
  static Process unless(Constraint c, Process body);
  static Process call(std::string name, TermVec args);

  bool valid() const { return node_ != nullptr; }
  // Node identity; stable for shared subtrees within a run (memo keys).
  const void* id() const { return node_.get(); }
  ProcKind kind() const { return node_->kind; }
  const Constraint& constraint() const { return node_->c; }
  const std::vector<std::string>& binders() const { return node_->binders; }
  const std::vector<Constraint>& seen() const { return node_->seen; }
  const std::vector<Process>& children() const { return node_->children; }
  const Process& body() const { return node_->children.front(); }
  const std::string& callee() const { return node_->callee; }
  const TermVec& args() const { return node_->args; }

  std::string str() const;  // concrete .utcc syntax

 private:
  struct Node {
    ProcKind kind;
    Constraint c;
    std::vector<std::string> binders;
    std::vector<Constraint> seen;
    std::vector<Process> children;
    std::string callee;
    TermVec args;
  };
  std::shared_ptr<const Node> node_;
  static Process mk(Node n);
};

struct Declaration {
  std::string name;
  std::vector<std::string> params;
  Process body;
};

struct Program {
  std::map<std::string, Declaration> decls;
  Process main;
  // Declared global variables (synchronization streams provided by the
  // environment); allowed free in declaration bodies.
  std::set<std::string> globals;

  const Declaration& decl(const std::string& name) const;
};

VarSet free_vars(const Process& p);

// Capture-avoiding substitution of terms for free variables. Binder
// clashes are resolved with fresh pool names from `names`.
Process subst_process(const Process& p, const Subst& s, FreshNames& names);

// Applies f to every constraint in the process (used by program
// transformations that move a process to another constraint system).
Process map_constraints(const Process& p,
                        const std::function<Constraint(const Constraint&)>& f);

// Structural congruence of Def. 2.3: alpha-conversion, Par as a
// commutative monoid with skip as identity. Decided by canonical forms.
Process congruence_canonical(const Process& p);
bool struct_congruent(const Process& p, const Process& q);

// Static well-formedness: unique declarations are enforced by the map;
// checks fv(body) within formals, and that every cycle through the call
// graph passes a next (guarded recursion).
void check_program(const Program& prog);

std::string program_str(const Program& prog);

}  // namespace utcc
