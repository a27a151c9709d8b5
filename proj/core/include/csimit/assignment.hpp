#pragma once

#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace csimit {

/// A partial assignment of symbolic values to named variables. Used for edge
/// labels, contexts, and restrictions of full assignments. Bindings are kept
/// sorted by variable name so equal assignments compare and print identically.
class PartialAssignment {
 public:
  PartialAssignment() = default;
  PartialAssignment(
      std::initializer_list<std::pair<const std::string, std::string>> init)
      : bindings_(init) {}

  void bind(const std::string& var, const std::string& value) {
    bindings_[var] = value;
  }

  bool binds(const std::string& var) const { return bindings_.count(var) > 0; }

  const std::string& at(const std::string& var) const {
    return bindings_.at(var);
  }

  std::optional<std::string> get(const std::string& var) const {
    auto it = bindings_.find(var);
    if (it == bindings_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<std::string> variables() const {
    std::vector<std::string> out;
    out.reserve(bindings_.size());
    for (const auto& [var, value] : bindings_) out.push_back(var);
    return out;
  }

  /// Restriction (s)_T: the bindings over exactly the requested variables.
  template <typename Container>
  PartialAssignment restrict_to(const Container& vars) const {
    PartialAssignment out;
    for (const auto& var : vars) {
      auto it = bindings_.find(var);
      if (it != bindings_.end()) out.bind(it->first, it->second);
    }
    return out;
  }

  /// Two assignments are compatible when they agree on all shared variables.
  bool compatible_with(const PartialAssignment& other) const {
    for (const auto& [var, value] : bindings_) {
      auto o = other.get(var);
      if (o && *o != value) return false;
    }
    return true;
  }

  /// True when this assignment binds every variable of `other` to the same
  /// value, i.e. this extends (implies) `other`.
  bool extends(const PartialAssignment& other) const {
    for (const auto& [var, value] : other.bindings_) {
      auto mine = get(var);
      if (!mine || *mine != value) return false;
    }
    return true;
  }

  /// Union of bindings; conflicting values on a shared variable are a logic
  /// error at the call site, reported via std::invalid_argument.
  PartialAssignment merged_with(const PartialAssignment& other) const;

  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }

  const std::map<std::string, std::string>& bindings() const {
    return bindings_;
  }

  /// Canonical "A=0,B=1" form, usable as a deterministic map key.
  std::string to_key() const;

  bool operator==(const PartialAssignment& other) const {
    return bindings_ == other.bindings_;
  }
  bool operator<(const PartialAssignment& other) const {
    return bindings_ < other.bindings_;
  }

 private:
  std::map<std::string, std::string> bindings_;
};

}  // namespace csimit
