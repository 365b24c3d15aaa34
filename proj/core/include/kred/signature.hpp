#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace kred {

/// Declared interface of one agent type. Every declared site can carry a
/// bond; sites declared with `~state` alternatives additionally carry an
/// internal state.
struct AgentSignature {
  std::vector<std::string> sites;  // declaration order
  std::map<std::string, std::vector<std::string>, std::less<>> internal_values;

  bool has_site(std::string_view site) const;
  bool is_internal(std::string_view site) const;
  bool is_binding(std::string_view site) const { return has_site(site); }
  bool allows_state(std::string_view site, std::string_view state) const;
};

class Signature {
 public:
  using Map = std::map<std::string, AgentSignature, std::less<>>;

  /// Throws Error(Signature) on duplicate agent.
  void add(const std::string& name, AgentSignature agent);

  const AgentSignature* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  const Map& agents() const noexcept { return agents_; }
  bool empty() const noexcept { return agents_.empty(); }

  /// Keeps only the agents named in `used`.
  Signature restricted_to(const std::vector<std::string>& used) const;

  friend bool operator==(const Signature&, const Signature&);

 private:
  Map agents_;
};

bool operator==(const AgentSignature& a, const AgentSignature& b);

/// Parses one or more `%agent: Name(site~v1~v2,site)` declarations.
Signature parse_signature(std::string_view text);

std::string to_string(const Signature& sig);

}  // namespace kred
