#pragma once

#include <string>
#include <vector>

#include "fwr/dynamics.hpp"

namespace fwr {

enum class Variant { Plain, Avoiding };
enum class Provenance { Optimized, Oracle, UserSupplied };

/// l x l table of quasipotential values between equilibria; the input to
/// the cycle-hierarchy engine.
struct QuasipotentialMatrix {
    Mat values;  // diagonal zero, off-diagonal nonnegative
    Variant variant = Variant::Plain;
    Provenance provenance = Provenance::UserSupplied;
    std::vector<Equilibrium> equilibria;  // optional (empty for user-supplied tables)
    std::vector<std::string> labels;      // e.g. "O_1","O_3","O_5"

    int size() const { return static_cast<int>(values.rows()); }

    /// Checks the structural invariants; throws InconsistentMatrix.
    void validate(double tolerance = 1e-9) const;
};

}  // namespace fwr
