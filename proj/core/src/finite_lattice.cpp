#include "utcc/finite_lattice.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace utcc {

FiniteLatticeSystem::FiniteLatticeSystem(
    std::string name, std::vector<std::string> elements,
    const std::vector<std::pair<std::string, std::string>>& leq)
    : name_(std::move(name)), elements_(std::move(elements)) {
  const int n = static_cast<int>(elements_.size());
  check_usage(n > 0, "finite lattice needs at least one element");
  for (int i = 0; i < n; ++i) {
    check_usage(by_name_.emplace(elements_[static_cast<std::size_t>(i)], i).second,
                "duplicate lattice element " + elements_[static_cast<std::size_t>(i)]);
  }
  check_usage(by_name_.count("true") && by_name_.count("false"),
              "finite lattice must contain elements 'true' and 'false'");
  bottom_ = by_name_.at("true");
  top_ = by_name_.at("false");

  leq_.assign(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
  for (int i = 0; i < n; ++i) leq_[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = true;
  for (const auto& [a, b] : leq) {
    check_usage(by_name_.count(a) && by_name_.count(b), "unknown element in order: " + a + " <= " + b);
    leq_[static_cast<std::size_t>(by_name_.at(a))][static_cast<std::size_t>(by_name_.at(b))] = true;
  }
  for (int i = 0; i < n; ++i) {
    leq_[static_cast<std::size_t>(bottom_)][static_cast<std::size_t>(i)] = true;
    leq_[static_cast<std::size_t>(i)][static_cast<std::size_t>(top_)] = true;
  }
  // Transitive closure.
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (leq_[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)])
        for (int j = 0; j < n; ++j)
          if (leq_[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)])
            leq_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
  // Antisymmetry.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      check_usage(!(i != j && leq_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] &&
                    leq_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]),
                  "order is not antisymmetric");
  // Unique least upper bounds.
  lub_.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), -1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int best = -1;
      for (int u = 0; u < n; ++u) {
        if (!leq_[static_cast<std::size_t>(i)][static_cast<std::size_t>(u)] ||
            !leq_[static_cast<std::size_t>(j)][static_cast<std::size_t>(u)])
          continue;
        if (best == -1 || leq_[static_cast<std::size_t>(u)][static_cast<std::size_t>(best)]) best = u;
      }
      // Verify best is below every upper bound (lub uniqueness).
      for (int u = 0; u < n; ++u) {
        if (leq_[static_cast<std::size_t>(i)][static_cast<std::size_t>(u)] &&
            leq_[static_cast<std::size_t>(j)][static_cast<std::size_t>(u)])
          check_usage(leq_[static_cast<std::size_t>(best)][static_cast<std::size_t>(u)],
                      "element pair without a least upper bound: " +
                          elements_[static_cast<std::size_t>(i)] + ", " +
                          elements_[static_cast<std::size_t>(j)]);
      }
      lub_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = best;
    }
}

FiniteLatticeSystem FiniteLatticeSystem::from_json_text(const std::string& text,
                                                        const std::string& name) {
  auto j = nlohmann::json::parse(text);
  std::vector<std::string> elements = j.at("elements").get<std::vector<std::string>>();
  std::vector<std::pair<std::string, std::string>> leq;
  for (const auto& pair : j.at("leq")) {
    check_usage(pair.is_array() && pair.size() == 2, "leq entries must be [a, b] pairs");
    leq.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
  }
  return FiniteLatticeSystem(j.value("name", name), std::move(elements), leq);
}

FiniteLatticeSystem FiniteLatticeSystem::from_json_file(const std::string& path) {
  std::ifstream in(path);
  check_usage(in.good(), "cannot open lattice file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str(), path);
}

Constraint FiniteLatticeSystem::lub(const Constraint& c, const Constraint& d) const {
  return make(lub_[static_cast<std::size_t>(index_of(c))][static_cast<std::size_t>(index_of(d))]);
}

bool FiniteLatticeSystem::entails(const Constraint& d, const Constraint& c) const {
  return leq_[static_cast<std::size_t>(index_of(c))][static_cast<std::size_t>(index_of(d))];
}

Constraint FiniteLatticeSystem::hide(const std::vector<std::string>& xs,
                                     const Constraint& c) const {
  (void)xs;
  check_same_system(c);
  return c;
}

Constraint FiniteLatticeSystem::diag(const std::vector<std::string>& xs,
                                     const TermVec& ts) const {
  check_usage(xs.size() == ts.size(), "diag: length mismatch");
  return true_c();
}

bool FiniteLatticeSystem::is_false(const Constraint& c) const { return index_of(c) == top_; }

std::string FiniteLatticeSystem::print(const Constraint& c) const {
  return elements_[static_cast<std::size_t>(index_of(c))];
}

Constraint FiniteLatticeSystem::parse_constraint(const std::string& text) const {
  std::string t;
  for (char ch : text)
    if (!isspace(static_cast<unsigned char>(ch))) t += ch;
  // Allow lubs of element names with /\ .
  std::size_t pos = 0;
  Constraint acc = true_c();
  while (pos < t.size()) {
    std::size_t sep = t.find("/\\", pos);
    std::string name = t.substr(pos, sep == std::string::npos ? std::string::npos : sep - pos);
    acc = lub(acc, element(name));
    if (sep == std::string::npos) break;
    pos = sep + 2;
  }
  return acc;
}

std::optional<std::vector<Constraint>> FiniteLatticeSystem::enumerate() const {
  std::vector<Constraint> out;
  for (int i = 0; i < static_cast<int>(elements_.size()); ++i) out.push_back(make(i));
  return out;
}

int FiniteLatticeSystem::index_of(const Constraint& c) const {
  check_same_system(c);
  return c.as<Elem>().id;
}

Constraint FiniteLatticeSystem::element(const std::string& name) const {
  auto it = by_name_.find(name);
  check_usage(it != by_name_.end(), "unknown lattice element '" + name + "'");
  return make(it->second);
}

}  // namespace utcc
