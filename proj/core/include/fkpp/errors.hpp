#pragma once

#include <stdexcept>
#include <string>

namespace fkpp {

/// Invalid user input: bad config values, violated scheme guards, malformed files.
/// CLI maps this to exit code 4.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical procedure failed to converge or the problem has no solution in
/// the requested regime (bad bisection bracket, front left the domain, ...).
/// CLI maps this to exit code 3.
class NonConvergence : public std::runtime_error {
public:
  explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

/// A structural hypothesis on the reaction term or the initial data fails.
/// CLI maps this to exit code 2.
class HypothesisError : public std::runtime_error {
public:
  explicit HypothesisError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fkpp
