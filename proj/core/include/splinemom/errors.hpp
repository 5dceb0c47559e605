#pragma once

#include <stdexcept>
#include <string>

namespace splinemom {

/// Parameter outside its admissible range (e.g. u outside [0,1]).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Violated call contract (dimension mismatch, wrong pair class, ...).
class ContractError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or incompatible geometry (non-watertight, bad knots, schema).
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Knot refinement failure (multiplicity overflow).
class RefinementError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Galerkin assembly failure; carries element-pair context where known.
class AssemblyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Linear solver failure (singular matrix, non-convergence).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File format or serialization failure.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace splinemom
