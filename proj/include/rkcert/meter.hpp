#pragma once

#include <cstdint>

namespace rkcert {

/// Communication and verifier-work counters for one protocol run. All fields
/// only ever grow during a run.
struct CostMeter {
  std::uint64_t elements_prover_to_verifier = 0;
  std::uint64_t elements_verifier_to_prover = 0;
  /// Permutation images, index lists and flags (sent by the prover).
  std::uint64_t integers_sent = 0;
  std::uint64_t verifier_field_ops = 0;
  /// Products of the input matrix (or its transpose) with a vector: mu(A).
  std::uint64_t verifier_matvecs = 0;
  /// Products with a selected square submatrix of the input.
  std::uint64_t verifier_submatrix_matvecs = 0;

  std::uint64_t field_elements() const {
    return elements_prover_to_verifier + elements_verifier_to_prover;
  }
  std::uint64_t communication() const { return field_elements() + integers_sent; }

  CostMeter& operator+=(const CostMeter& o) {
    elements_prover_to_verifier += o.elements_prover_to_verifier;
    elements_verifier_to_prover += o.elements_verifier_to_prover;
    integers_sent += o.integers_sent;
    verifier_field_ops += o.verifier_field_ops;
    verifier_matvecs += o.verifier_matvecs;
    verifier_submatrix_matvecs += o.verifier_submatrix_matvecs;
    return *this;
  }

  friend bool operator==(const CostMeter&, const CostMeter&) = default;
};

}  // namespace rkcert
