// SPDX-License-Identifier: Apache-2.0

#ifndef SCENTT_ERRORS_HPP
#define SCENTT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace scentt {

/// Base class for all library-specific failures.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- modulus / context construction ---
struct NotPrime : Error {
  explicit NotPrime(const std::string& msg) : Error(msg) {}
};
struct NoRootExists : Error {
  explicit NoRootExists(const std::string& msg) : Error(msg) {}
};
struct ModulusTooLarge : Error {
  explicit ModulusTooLarge(const std::string& msg) : Error(msg) {}
};

// --- transform-level misuse ---
struct ContextMismatch : Error {
  explicit ContextMismatch(const std::string& msg) : Error(msg) {}
};
struct NoPsiExists : Error {
  explicit NoPsiExists(const std::string& msg) : Error(msg) {}
};

// --- memory model ---
struct IndexOutOfRange : Error {
  explicit IndexOutOfRange(const std::string& msg) : Error(msg) {}
};
struct CycleOutOfRange : Error {
  explicit CycleOutOfRange(const std::string& msg) : Error(msg) {}
};
struct CollisionDetected : Error {
  explicit CollisionDetected(const std::string& msg) : Error(msg) {}
};
struct OverflowDetected : Error {
  explicit OverflowDetected(const std::string& msg) : Error(msg) {}
};
// A read trigger on an empty queue in strict mode. The write-side capacity
// violation stays OverflowDetected; draining past empty is its own condition.
struct UnderflowDetected : Error {
  explicit UnderflowDetected(const std::string& msg) : Error(msg) {}
};

// --- pipeline ---
struct ScheduleViolation : Error {
  explicit ScheduleViolation(const std::string& msg) : Error(msg) {}
};
struct NotAPermutation : Error {
  explicit NotAPermutation(const std::string& msg) : Error(msg) {}
};

// --- clock-phase assignment ---
struct CyclicGraph : Error {
  explicit CyclicGraph(const std::string& msg) : Error(msg) {}
};
struct InfeasibleK : Error {
  explicit InfeasibleK(const std::string& msg) : Error(msg) {}
};

// --- scale-out helpers ---
struct NotCoprime : Error {
  explicit NotCoprime(const std::string& msg) : Error(msg) {}
};
struct OutOfRange : Error {
  explicit OutOfRange(const std::string& msg) : Error(msg) {}
};
struct SizeMismatch : Error {
  explicit SizeMismatch(const std::string& msg) : Error(msg) {}
};

}  // namespace scentt

#endif  // SCENTT_ERRORS_HPP
