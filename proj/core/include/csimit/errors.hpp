#pragma once

#include <stdexcept>
#include <string>

namespace csimit {

/// Malformed model/graph input (bad JSON, unknown variable, invariant breach).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// A computation would exceed a configured state/context cap.
class ResourceCapError : public std::runtime_error {
 public:
  explicit ResourceCapError(const std::string& what) : std::runtime_error(what) {}
};

/// Conditioning on an event of probability zero. Callers decide how to react
/// (e.g. fill a policy row uniformly, or treat an equation block as vacuous).
class ZeroMassContext : public std::runtime_error {
 public:
  explicit ZeroMassContext(const std::string& what) : std::runtime_error(what) {}
};

/// KL divergence requested where q = 0 on the support of p.
class AbsoluteContinuityError : public std::runtime_error {
 public:
  explicit AbsoluteContinuityError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace csimit
