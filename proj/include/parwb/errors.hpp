#pragma once

#include <stdexcept>
#include <string>

namespace parwb {

// Precondition or input-domain failure; the CLI maps this to exit code 2.
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw DomainError(what);
}

}  // namespace parwb
