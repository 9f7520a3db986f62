#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nuh {

/// A computation would exceed its configured work cap.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::uint64_t requested, std::uint64_t budget)
      : std::runtime_error("work budget exceeded: requested " + std::to_string(requested) +
                           " > budget " + std::to_string(budget)),
        requested_(requested),
        budget_(budget) {}

  std::uint64_t requested() const { return requested_; }
  std::uint64_t budget() const { return budget_; }

 private:
  std::uint64_t requested_;
  std::uint64_t budget_;
};

/// Root finding or a numerical check did not produce a usable result.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nuh
