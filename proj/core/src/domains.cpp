#include "utcc/domains.hpp"

#include <algorithm>

#include "utcc/denot.hpp"

namespace utcc {

DomainSpec parse_domain_spec(const std::string& text) {
  DomainSpec spec;
  std::string t;
  for (char c : text)
    if (!isspace(static_cast<unsigned char>(c))) t += c;
  auto paren = t.find('(');
  if (paren == std::string::npos) {
    spec.kind = t;
    return spec;
  }
  check_usage(t.back() == ')', "malformed domain spec " + text);
  spec.kind = t.substr(0, paren);
  spec.arg = t.substr(paren + 1, t.size() - paren - 2);
  return spec;
}

namespace {

// Collects constraints reachable from main, unfolding calls (bounded),
// renaming local binders per time offset and instantiating abstraction
// binders over the candidate terms.
struct SeedCollector {
  const Program& prog;
  std::size_t k;
  const TermVec& candidates;
  std::set<std::string> visited;
  std::set<Term> seeds;
  FreshNames scratch;

  void add_constraint(const Constraint& c) {
    const auto* eq = dynamic_cast<const EquationSystem*>(c.system());
    if (!eq) return;
    const FormulaData& p = eq->payload(c);
    if (p.is_false) return;
    std::set<std::string> bound(p.bound.begin(), p.bound.end());
    auto add_term = [&](const Term& t) {
      bool has_bound = false;
      for (const auto& v : t.vars())
        if (bound.count(v)) has_bound = true;
      if (!has_bound) seeds.insert(t);
    };
    for (const auto& [x, t] : p.eqs) {
      add_term(Term::var(x));
      add_term(t);
    }
    for (const auto& a : p.preds)
      for (const auto& t : a.args) add_term(t);
  }

  void walk(const Process& p, std::size_t offset, int depth) {
    if (offset > k || depth > 40) return;
    switch (p.kind()) {
      case ProcKind::Skip:
        return;
      case ProcKind::Tell:
        add_constraint(p.constraint());
        return;
      case ProcKind::Abs: {
        add_constraint(p.constraint());
        if (p.binders().empty()) {
          walk(p.body(), offset, depth + 1);
          return;
        }
        // Instantiate the binders over the candidate terms, one variable
        // at a time to keep the seed set linear in |candidates|.
        for (const auto& cand : candidates) {
          bool adm = true;
          for (const auto& b : p.binders())
            if (cand.contains_var(b)) adm = false;
          if (!adm) continue;
          Subst s;
          for (const auto& b : p.binders()) s.emplace(b, cand);
          Constraint g = p.constraint();
          add_constraint(g.system()->subst(g, p.binders(),
                                           TermVec(p.binders().size(), cand)));
          walk(subst_process(p.body(), s, scratch), offset, depth + 1);
        }
        // Pairwise-distinct instantiations for two-binder guards.
        if (p.binders().size() == 2) {
          for (const auto& c1 : candidates)
            for (const auto& c2 : candidates) {
              bool adm = true;
              for (const auto& b : p.binders())
                if (c1.contains_var(b) || c2.contains_var(b)) adm = false;
              if (!adm) continue;
              Constraint g = p.constraint();
              add_constraint(g.system()->subst(g, p.binders(), {c1, c2}));
              Subst s;
              s.emplace(p.binders()[0], c1);
              s.emplace(p.binders()[1], c2);
              walk(subst_process(p.body(), s, scratch), offset, depth + 1);
            }
        }
        return;
      }
      case ProcKind::Par:
        for (const auto& q : p.children()) walk(q, offset, depth + 1);
        return;
      case ProcKind::Local: {
        Subst rename;
        for (const auto& b : p.binders())
          rename.emplace(b, Term::var(local_instance_name(b, offset)));
        walk(subst_process(p.body(), rename, scratch), offset, depth + 1);
        return;
      }
      case ProcKind::Next:
        walk(p.body(), offset + 1, depth + 1);
        return;
      case ProcKind::Unless:
        add_constraint(p.constraint());
        walk(p.body(), offset + 1, depth + 1);
        return;
      case ProcKind::Call: {
        std::string key = p.callee() + "@" + std::to_string(offset);
        for (const auto& t : p.args()) key += "|" + t.str();
        if (!visited.insert(key).second) return;
        const Declaration& d = prog.decl(p.callee());
        if (d.params.size() != p.args().size()) return;
        Subst s;
        for (std::size_t i = 0; i < d.params.size(); ++i) s.emplace(d.params[i], p.args()[i]);
        walk(subst_process(d.body, s, scratch), offset, depth + 1);
        return;
      }
    }
  }
};

}  // namespace

TermVec universe_seeds_from_program(const Program& prog, std::size_t k,
                                    const TermVec& instantiation_candidates) {
  SeedCollector col{prog, k, instantiation_candidates, {}, {}, {}};
  if (prog.main.valid()) col.walk(prog.main, 1, 0);
  return TermVec(col.seeds.begin(), col.seeds.end());
}

Description hat_description(const ConstraintSystem* base, const SuspensionSystem* susp) {
  Description d;
  d.name = "hat(" + base->name() + ")";
  d.concrete = base;
  d.abstr = susp;
  d.alpha = [susp](const Constraint& c) { return susp->hat(c); };
  // <e, f> approximates exactly the c' with c' entails e and f = susp; for
  // f = nsusp nothing is approximated and any answer is sound. Both cases
  // collapse to base entailment.
  d.abs_entails_conc = [susp](const Constraint& da, const Constraint& c) {
    return susp->base().entails(susp->base_of(da), c);
  };
  return d;
}

namespace {

DomainBundle make_base(const DomainSpec& spec, const ProgramSource& src,
                       const DomainConfig& cfg, Program* bound_out);

DomainBundle make_equation_base(const std::string& name, const Signature& sig0,
                                const ProgramSource& src, const DomainConfig& cfg,
                                Program* bound_out,
                                std::shared_ptr<const TermPolicy> policy = nullptr) {
  Signature sig = sig0;
  sig.merge(src.signature);
  if (name == "herbrand" || name == "pos" || name == "postype") {
    sig.functions.emplace("cons", 2);
    sig.functions.emplace("nil", 0);
  }
  std::vector<std::string> pool = src.pool;
  for (const auto& v : cfg.extra_pool)
    if (std::find(pool.begin(), pool.end(), v) == pool.end()) pool.push_back(v);
  TermUniverse tu;
  for (const auto& c : sig.constants) tu.add(Term::app(c));
  if (sig.functions.count("nil")) tu.add(Term::app("nil"));
  for (const auto& v : pool) tu.add(Term::var(v));
  if (cfg.universe_depth > 0) {
    TermUniverse gen = TermUniverse::generate(sig, pool, static_cast<int>(cfg.universe_depth));
    tu.add_all(gen.terms());
  }

  DomainBundle b;
  auto sys = std::make_shared<EquationSystem>(name, sig, pool, tu, policy);
  b.owned.push_back(sys);
  b.program_system = sys.get();
  b.target_system = sys.get();

  Program prog = bind_program(src, *sys);

  // Seed the universe from the program: pool variables, local instances
  // and constants are the instantiation candidates.
  std::vector<std::string> full_pool = pool;
  for (const auto& v : collect_pool(prog, cfg.k))
    if (std::find(full_pool.begin(), full_pool.end(), v) == full_pool.end())
      full_pool.push_back(v);
  sys->set_pool(full_pool);
  TermVec candidates;
  for (const auto& v : full_pool) candidates.push_back(Term::var(v));
  for (const auto& c : sig.constants) candidates.push_back(Term::app(c));
  sys->extend_universe(candidates);
  sys->extend_universe(universe_seeds_from_program(prog, cfg.k, candidates));
  for (const auto& t : cfg.extra_universe_texts)
    sys->extend_universe({parse_term(t, sig)});
  sys->extend_universe(cfg.extra_universe);

  *bound_out = std::move(prog);
  return b;
}

DomainBundle make_base(const DomainSpec& spec, const ProgramSource& src,
                       const DomainConfig& cfg, Program* bound_out) {
  if (spec.kind == "finite") {
    check_usage(!spec.arg.empty(), "finite domain needs a lattice file");
    DomainBundle b;
    auto sys = std::make_shared<FiniteLatticeSystem>(FiniteLatticeSystem::from_json_file(spec.arg));
    b.owned.push_back(sys);
    b.program_system = sys.get();
    b.target_system = sys.get();
    *bound_out = bind_program(src, *sys);
    return b;
  }
  if (spec.kind == "herbrand") {
    Signature sig;
    return make_equation_base("herbrand", sig, src, cfg, bound_out);
  }
  if (spec.kind == "crypto") {
    // Concrete side first; the cut system shares signature and universe.
    Signature sig = crypto_signature({});
    DomainBundle b = make_equation_base("crypto", sig, src, cfg, bound_out);
    auto* conc = dynamic_cast<EquationSystem*>(b.program_system);
    Signature asig = conc->signature();
    asig.constants.insert("mtop");
    TermUniverse atu = *conc->universe();
    atu.add(m_top());
    auto abst = std::make_shared<EquationSystem>(
        "crypto_cut" + std::to_string(cfg.kappa), asig, conc->pool(), atu,
        std::make_shared<CutPolicy>(cfg.kappa));
    abst->set_restrict_instantiation(true);
    conc->set_restrict_instantiation(true);
    b.owned.push_back(abst);
    b.target_system = abst.get();
    Description d;
    d.name = "crypto(kappa=" + std::to_string(cfg.kappa) + ")";
    d.concrete = conc;
    d.abstr = abst.get();
    EquationSystem* ab = abst.get();
    std::size_t kap = cfg.kappa;
    d.alpha = [ab](const Constraint& c) { return ab->import(c); };
    d.abs_entails_conc = [conc, ab, kap](const Constraint& da, const Constraint& c) {
      const FormulaData& p = conc->payload(c);
      if (p.is_false) return ab->is_false(da);
      for (const auto& [x, t] : p.eqs) {
        (void)x;
        if (message_length(t) > kap) return false;
      }
      for (const auto& a : p.preds)
        for (const auto& t : a.args)
          if (message_length(t) > kap) return false;
      return ab->entails_strict(da, ab->import(c));
    };
    b.desc = std::move(d);
    return b;
  }
  if (spec.kind == "pos" || spec.kind == "postype") {
    Signature sig;
    DomainBundle b = make_equation_base(spec.kind, sig, src, cfg, bound_out);
    auto* conc = dynamic_cast<EquationSystem*>(b.program_system);
    // Guard-only variables (synchronization streams) carry no groundness
    // information; keeping them out of the truth tables bounds the width.
    std::vector<std::string> gpool = collect_pool(*bound_out, cfg.k, /*tells_only=*/true);
    {
      std::set<std::string> have(gpool.begin(), gpool.end());
      VarSet mains = bound_out->main.valid() ? free_vars(bound_out->main) : VarSet{};
      for (const auto& v : mains)
        if (have.insert(v).second) gpool.push_back(v);
      for (const auto& v : cfg.extra_pool)
        if (have.insert(v).second) gpool.push_back(v);
      std::sort(gpool.begin(), gpool.end());
    }
    auto gt = std::make_shared<GroundnessSystem>(gpool, spec.kind == "postype",
                                                 cfg.pos_pool_cap);
    b.owned.push_back(gt);
    b.target_system = gt.get();
    Description d;
    d.name = spec.kind;
    d.concrete = conc;
    d.abstr = gt.get();
    GroundnessSystem* g = gt.get();
    d.alpha = [g](const Constraint& c) { return g->alpha_from(c); };
    d.abs_entails_conc = [g](const Constraint& da, const Constraint& c) {
      return g->tilde_entails(da, c);
    };
    b.desc = std::move(d);
    return b;
  }
  throw UsageError("unknown domain '" + spec.kind + "'");
}

}  // namespace

DomainBundle make_domain(const DomainSpec& spec, const ProgramSource& src,
                         const DomainConfig& cfg, Program* bound_out) {
  if (spec.kind != "susp") return make_base(spec, src, cfg, bound_out);

  DomainSpec base_spec = parse_domain_spec(spec.arg.empty() ? "herbrand" : spec.arg);
  DomainBundle b = make_base(base_spec, src, cfg, bound_out);
  b.is_suspension = true;

  // Wrap the concrete side; programs stay bound over the base system and
  // are lifted by the hat transformation.
  std::shared_ptr<ConstraintSystem> conc_base;
  std::shared_ptr<ConstraintSystem> abst_base;
  for (const auto& s : b.owned) {
    if (s.get() == b.program_system) conc_base = s;
    if (s.get() == b.target_system) abst_base = s;
  }
  auto susp_conc = std::make_shared<SuspensionSystem>(conc_base);
  b.owned.push_back(susp_conc);
  b.susp_concrete = susp_conc.get();

  if (b.desc) {
    auto susp_abs = std::make_shared<SuspensionSystem>(abst_base);
    b.owned.push_back(susp_abs);
    b.susp = susp_abs.get();
    Description base_desc = *b.desc;
    Description d;
    d.name = "susp(" + base_desc.name + ")";
    d.concrete = susp_conc.get();
    d.abstr = susp_abs.get();
    SuspensionSystem* sc = susp_conc.get();
    SuspensionSystem* sa = susp_abs.get();
    d.alpha = [sc, sa, base_desc](const Constraint& c) {
      return sa->make_pair(base_desc.alpha(sc->base_of(c)), sc->is_nsusp(c));
    };
    d.abs_entails_conc = [sc, sa, base_desc](const Constraint& da, const Constraint& c) {
      if (!sa->is_nsusp(da) && sc->is_nsusp(c)) return false;
      return base_desc.abs_entails_conc(sa->base_of(da), sc->base_of(c));
    };
    b.desc = std::move(d);
    b.target_system = sa;
  } else {
    // Finite base: the suspension system is both sides (identity).
    b.susp = susp_conc.get();
    b.target_system = susp_conc.get();
  }
  return b;
}

}  // namespace utcc
