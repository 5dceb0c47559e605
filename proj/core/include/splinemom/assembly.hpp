#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "splinemom/conforming_space.hpp"
#include "splinemom/kernels.hpp"
#include "splinemom/quadrature.hpp"

namespace splinemom {

enum class SystemKind { Efie, Mfie };

/// Dense Galerkin system (Z,f) or (Y,g).
struct DenseSystem {
    SystemKind kind = SystemKind::Efie;
    Eigen::MatrixXcd matrix;
    Eigen::VectorXcd rhs;
};

/// Element-pair Galerkin integrator for the EFIE operator. The Piola
/// structure cancels every surface Jacobian in the pulled-back bilinear
/// form, so element data stores DF*vhat and the parametric divergence.
/// Construction precomputes per-element quadrature data and the singular
/// rules; pair evaluation is pure and thread-safe afterwards.
class EfieIntegrator {
public:
    struct ElementData {
        std::vector<Eigen::Vector3d> points;
        Eigen::VectorXd weights; // parametric weights incl. element area
        Eigen::MatrixXcd value[3]; // (nodes x active): components of DF*vhat, sign folded
        Eigen::MatrixXcd div;      // (nodes x active): parametric divergence, sign folded
        std::vector<int> globals;  // active (non-removed) dofs
        std::vector<Eigen::Vector3d> probe; // coarse physical grid for proximity
        int active = 0;
    };

    EfieIntegrator(const ConformingSpace& space, double k, QuadratureConfig quad);

    const ConformingSpace& space() const { return space_; }
    double wavenumber() const { return k_; }
    int order() const { return order_; }
    const ElementData& element_data(int e) const { return elements_[e]; }

    /// Local pair block (active_x x active_y), signs folded in; out is
    /// resized. Entries add into Z(globals_x[i], globals_y[j]).
    void pair_block(int ex, int ey, Eigen::MatrixXcd& out) const;

    /// One Galerkin matrix entry by iterating the supports of both dofs.
    std::complex<double> single_entry(int dof_row, int dof_col) const;

    /// Forcing contributions of one element: pairs (global, value) with
    /// value = 1/(j omega mu) * integral of N . E^i.
    void element_forcing(int e, const ScatteringConfig& config,
                         std::vector<std::pair<int, std::complex<double>>>& out) const;

private:
    const ConformingSpace& space_;
    double k_;
    QuadratureConfig quad_;
    int order_;
    PairRule rule_coincident_, rule_edge_, rule_vertex_;
    std::vector<ElementData> elements_;
    // non-far pair blocks are expensive; precomputed once, read-only after
    std::unordered_map<std::uint64_t, Eigen::MatrixXcd> cached_blocks_;

    ElementData build_element_data(int e, const Rule2D& rule) const;
    void singular_block(int ex, int ey, PairClass cls, Eigen::MatrixXcd& out) const;
    void regular_block(const ElementData& a, const ElementData& b, Eigen::MatrixXcd& out) const;
    void near_block(int ex, int ey, Eigen::MatrixXcd& out) const;
};

/// Dense EFIE assembly: Z_AB and f_A. Quadrature order defaults to
/// max component degree + 2; parallel over source elements.
DenseSystem assemble_efie(const ConformingSpace& div_space, const ScatteringConfig& config,
                          const QuadratureConfig& quad = {});

/// Dense MFIE assembly (1/2 identity term plus rotated-kernel double
/// integral) over index-aligned div and curl spaces.
DenseSystem assemble_mfie(const ConformingSpace& div_space, const ConformingSpace& curl_space,
                          const ScatteringConfig& config, const QuadratureConfig& quad = {});

/// The MFIE 1/2-identity (mass) block alone.
Eigen::MatrixXcd mfie_identity_block(const ConformingSpace& curl_space,
                                     const QuadratureConfig& quad = {});

/// Direct LU solve; verifies the residual and throws SolverError if the
/// factorization breaks down.
Eigen::VectorXcd solve_dense(const Eigen::MatrixXcd& matrix, const Eigen::VectorXcd& rhs);

/// Binary matrix export: two uint64 dims then row-major complex entries as
/// little-endian 64-bit floats (re, im per entry).
void write_matrix(const Eigen::MatrixXcd& matrix, const std::string& path);
Eigen::MatrixXcd read_matrix(const std::string& path);

} // namespace splinemom
