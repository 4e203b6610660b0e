#ifndef DECKLAB_QUANTUM_HPP
#define DECKLAB_QUANTUM_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace decklab::quantum {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr int kMaxDim = 8;

/// An orthonormal basis of C^d together with its rank-1 projectors
/// |b_j><b_j|. Construction checks orthonormality: the projectors must
/// sum to the identity and be mutually annihilating within 1e-12.
class ProjectorFamily {
public:
    explicit ProjectorFamily(Mat basis);

    int dim() const { return static_cast<int>(basis_.rows()); }
    const Mat& basis() const { return basis_; }
    Vec vector(int j) const { return basis_.col(j); }
    const Mat& projector(int j) const { return projectors_[static_cast<size_t>(j)]; }

private:
    Mat basis_;  // columns are the basis vectors
    std::vector<Mat> projectors_;
};

/// A d x d density operator: hermitian (1e-12), unit trace (1e-12),
/// positive semidefinite (eigenvalues >= -1e-10). Construction checks.
class DensityOperator {
public:
    explicit DensityOperator(Mat rho);
    static DensityOperator pure(const Vec& psi);

    int dim() const { return static_cast<int>(rho_.rows()); }
    const Mat& matrix() const { return rho_; }

private:
    Mat rho_;
};

/// Pr of seeing the projectors' outcomes in order: Tr(rho A^dag A) with
/// A = L_k ... L_2 L_1. Real within 1e-10 and clamped to [0,1]; throws
/// QuantumError on dimension mismatch.
double sandwich_prob(const DensityOperator& rho, const std::vector<Mat>& projectors);

/// Convenience: Pr{ p_j then q_k } from rho.
double ordered_pair_prob(const DensityOperator& rho, const ProjectorFamily& p, int j,
                         const ProjectorFamily& q, int k);

// ---------------------------------------------------------------------------
// Randomized check of: projector families commute  <=>  two-step
// probabilities are order-independent for every state.
// ---------------------------------------------------------------------------

struct FuzzReport {
    struct DimStats {
        int dim = 0;
        long long compatible = 0;    // max commutator norm < 1e-10, symmetry held
        long long incompatible = 0;  // some norm > 1e-6, witness found
        long long boundary = 0;      // in between: not classified (none expected)
        long long failures = 0;      // classification contradicted
    };
    std::vector<DimStats> per_dim;
    long long total_failures = 0;
    /// One concrete incompatibility witness for reporting.
    std::string witness;
};

/// `trials` random basis pairs per dimension. Every fourth pair is built
/// compatible (equal bases, permuted columns, or rephased columns); the
/// rest are independent Haar-random pairs. For each pair the max
/// commutator Frobenius norm decides the expected behavior, which is then
/// checked against a probe set of states (both bases' projectors, random
/// pure and mixed states). Tolerances: symmetric within 1e-9 when norms
/// are below 1e-10; an asymmetry witness above 1e-8 when any norm exceeds
/// 1e-6.
FuzzReport theorem_fuzz(const std::vector<int>& dims, long long trials, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Marginal-probability gap for an unread intermediate observation.
// ---------------------------------------------------------------------------

struct MarginalCheck {
    /// Per outcome k of Q:
    std::vector<double> lhs;      // sum_t |<q_k|p_t>|^2 |<p_t|psi>|^2
    std::vector<double> dephased; // <q_k| sum_t L_t psi psi^dag L_t |q_k>
    std::vector<double> direct;   // |<q_k|psi>|^2
    double max_lhs_vs_dephased = 0;  // always tiny: same quantity two ways
    double max_lhs_vs_direct = 0;    // the actual gap; zero iff no coherence lost
};

/// Throws QuantumError if psi is not a unit vector (1e-12) or dimensions
/// mismatch; throws if lhs and dephased disagree beyond 1e-10 (they are
/// algebraically identical).
MarginalCheck margenau_check(const Vec& psi, const ProjectorFamily& p,
                             const ProjectorFamily& q);

// ---------------------------------------------------------------------------
// Random inputs.
// ---------------------------------------------------------------------------

Mat random_unitary(int dim, std::uint64_t seed);
Vec random_pure_state(int dim, std::uint64_t seed);
Mat random_density_matrix(int dim, std::uint64_t seed);

}  // namespace decklab::quantum

#endif
