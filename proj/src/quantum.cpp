#include "decklab/quantum.hpp"

#include "decklab/entropy.hpp"
#include "decklab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace decklab::quantum {

namespace {

constexpr double kOrthoTol = 1e-12;
constexpr double kHermTol = 1e-12;
constexpr double kPsdTol = 1e-10;
constexpr double kRealTol = 1e-10;

constexpr double kCommuteNorm = 1e-10;   // below: treated as commuting
constexpr double kNoncommuteNorm = 1e-6; // above: treated as non-commuting
constexpr double kSymmetryTol = 1e-9;    // commuting pairs must stay under
constexpr double kWitnessFloor = 1e-8;   // non-commuting pairs must exceed

void check_dim(int d, const char* what) {
    if (d < 2 || d > kMaxDim)
        throw QuantumError(std::string(what) + ": dimension must be 2.." +
                           std::to_string(kMaxDim));
}

std::mt19937_64 seeded_engine(std::uint64_t seed) {
    return std::mt19937_64(mix64(seed ^ 0x7b3c9d2f11e4a601ull));
}

}  // namespace

ProjectorFamily::ProjectorFamily(Mat basis) : basis_(std::move(basis)) {
    if (basis_.rows() != basis_.cols())
        throw QuantumError("basis matrix must be square");
    const int d = static_cast<int>(basis_.rows());
    check_dim(d, "projector family");
    projectors_.reserve(static_cast<size_t>(d));
    for (int j = 0; j < d; ++j)
        projectors_.push_back(basis_.col(j) * basis_.col(j).adjoint());

    // Contract checks on the projectors themselves: complete and
    // mutually annihilating.
    Mat sum = Mat::Zero(d, d);
    for (const Mat& p : projectors_) sum += p;
    if ((sum - Mat::Identity(d, d)).norm() > kOrthoTol * d)
        throw QuantumError("projectors do not sum to the identity");
    for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
            const Mat prod = projectors_[static_cast<size_t>(j)] *
                             projectors_[static_cast<size_t>(k)];
            const Mat want = j == k ? projectors_[static_cast<size_t>(j)] : Mat::Zero(d, d);
            if ((prod - want).norm() > kOrthoTol * d)
                throw QuantumError("projectors are not orthogonal idempotents");
        }
    }
}

DensityOperator::DensityOperator(Mat rho) : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols())
        throw QuantumError("density operator must be square");
    check_dim(static_cast<int>(rho_.rows()), "density operator");
    if ((rho_ - rho_.adjoint()).norm() > kHermTol * rho_.rows())
        throw QuantumError("density operator is not hermitian");
    if (std::abs(rho_.trace().real() - 1.0) > kHermTol * rho_.rows() ||
        std::abs(rho_.trace().imag()) > kHermTol)
        throw QuantumError("density operator trace is not 1");
    Eigen::SelfAdjointEigenSolver<Mat> es(rho_);
    if (es.eigenvalues().minCoeff() < -kPsdTol)
        throw QuantumError("density operator has a negative eigenvalue");
}

DensityOperator DensityOperator::pure(const Vec& psi) {
    if (std::abs(psi.norm() - 1.0) > kHermTol * psi.size())
        throw QuantumError("state vector is not normalized");
    return DensityOperator(psi * psi.adjoint());
}

double sandwich_prob(const DensityOperator& rho, const std::vector<Mat>& projectors) {
    const int d = rho.dim();
    if (projectors.empty()) throw QuantumError("sandwich needs at least one projector");
    Mat chain = Mat::Identity(d, d);
    for (const Mat& p : projectors) {
        if (p.rows() != d || p.cols() != d)
            throw QuantumError("projector dimension mismatch");
        chain = p * chain;
    }
    const std::complex<double> t = (chain * rho.matrix() * chain.adjoint()).trace();
    if (std::abs(t.imag()) > kRealTol)
        throw QuantumError("sandwich probability came out non-real");
    const double v = t.real();
    if (v < -kRealTol || v > 1.0 + kRealTol)
        throw QuantumError("sandwich probability outside [0,1]");
    return std::clamp(v, 0.0, 1.0);
}

double ordered_pair_prob(const DensityOperator& rho, const ProjectorFamily& p, int j,
                         const ProjectorFamily& q, int k) {
    return sandwich_prob(rho, {p.projector(j), q.projector(k)});
}

// ---------------------------------------------------------------------------
// Random inputs
// ---------------------------------------------------------------------------

namespace {

Mat ginibre(int d, std::mt19937_64& eng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Mat g(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) g(r, c) = {normal(eng), normal(eng)};
    return g;
}

}  // namespace

Mat random_unitary(int dim, std::uint64_t seed) {
    check_dim(dim, "random unitary");
    auto eng = seeded_engine(seed);
    const Mat g = ginibre(dim, eng);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the phase convention so the distribution is uniform (Haar).
    for (int c = 0; c < dim; ++c) {
        const std::complex<double> diag = r(c, c);
        if (std::abs(diag) > 0) q.col(c) *= diag / std::abs(diag);
    }
    return q;
}

Vec random_pure_state(int dim, std::uint64_t seed) {
    check_dim(dim, "random state");
    auto eng = seeded_engine(seed ^ 0x5a5a5a5a5a5a5a5aull);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = {normal(eng), normal(eng)};
    return v / v.norm();
}

Mat random_density_matrix(int dim, std::uint64_t seed) {
    check_dim(dim, "random density matrix");
    auto eng = seeded_engine(seed ^ 0xc3c3c3c3c3c3c3c3ull);
    const Mat g = ginibre(dim, eng);
    Mat rho = g * g.adjoint();
    rho /= rho.trace();
    // Round away the tiny hermiticity error so the constructor's checks
    // measure the contract, not accumulation noise.
    return (rho + Mat(rho.adjoint())) / 2.0;
}

// ---------------------------------------------------------------------------
// theorem_fuzz
// ---------------------------------------------------------------------------

FuzzReport theorem_fuzz(const std::vector<int>& dims, long long trials, std::uint64_t seed) {
    FuzzReport report;
    for (int d : dims) {
        check_dim(d, "theorem fuzz");
        FuzzReport::DimStats stats;
        stats.dim = d;

        for (long long t = 0; t < trials; ++t) {
            const std::uint64_t trial_seed =
                mix64(seed ^ (static_cast<std::uint64_t>(d) << 32) ^
                      static_cast<std::uint64_t>(t));
            const Mat u = random_unitary(d, trial_seed);
            Mat v;
            // Every fourth pair is compatible by construction; rotate
            // among the three ways that happens.
            switch (t % 12) {
            case 0: v = u; break;
            case 4: {  // permuted columns: same projector set, relabeled
                v = Mat(d, d);
                auto eng = seeded_engine(trial_seed ^ 0x11ull);
                std::vector<int> perm(static_cast<size_t>(d));
                for (int i = 0; i < d; ++i) perm[static_cast<size_t>(i)] = i;
                std::shuffle(perm.begin(), perm.end(), eng);
                for (int c = 0; c < d; ++c) v.col(c) = u.col(perm[static_cast<size_t>(c)]);
                break;
            }
            case 8: {  // rephased columns: identical projectors
                v = u;
                auto eng = seeded_engine(trial_seed ^ 0x22ull);
                std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
                for (int c = 0; c < d; ++c)
                    v.col(c) *= std::polar(1.0, angle(eng));
                break;
            }
            default: v = random_unitary(d, trial_seed ^ 0x33ull); break;
            }

            const ProjectorFamily p(u), q(v);

            double max_comm = 0;
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k)
                    max_comm = std::max(
                        max_comm, (p.projector(j) * q.projector(k) -
                                   q.projector(k) * p.projector(j))
                                      .norm());

            // Probe states: each family's own basis states plus random
            // pure and mixed states.
            std::vector<DensityOperator> probes;
            for (int j = 0; j < d; ++j) probes.push_back(DensityOperator(p.projector(j)));
            for (int k = 0; k < d; ++k) probes.push_back(DensityOperator(q.projector(k)));
            for (int r = 0; r < 3; ++r)
                probes.push_back(DensityOperator::pure(
                    random_pure_state(d, trial_seed ^ (0x100ull + static_cast<std::uint64_t>(r)))));
            for (int r = 0; r < 2; ++r)
                probes.push_back(DensityOperator(random_density_matrix(
                    d, trial_seed ^ (0x200ull + static_cast<std::uint64_t>(r)))));

            double max_asym = 0;
            int wit_j = 0, wit_k = 0;
            for (const DensityOperator& rho : probes) {
                for (int j = 0; j < d; ++j) {
                    for (int k = 0; k < d; ++k) {
                        const double a = ordered_pair_prob(rho, p, j, q, k);
                        const double b = ordered_pair_prob(rho, q, k, p, j);
                        const double asym = std::abs(a - b);
                        if (asym > max_asym) {
                            max_asym = asym;
                            wit_j = j;
                            wit_k = k;
                        }
                    }
                }
            }

            if (max_comm < kCommuteNorm) {
                if (max_asym < kSymmetryTol) {
                    ++stats.compatible;
                } else {
                    ++stats.failures;
                }
            } else if (max_comm > kNoncommuteNorm) {
                if (max_asym > kWitnessFloor) {
                    ++stats.incompatible;
                    if (report.witness.empty()) {
                        char buf[160];
                        std::snprintf(buf, sizeof buf,
                                      "d=%d pair with max commutator norm %.3g: "
                                      "|Pr{p%d&q%d} - Pr{q%d&p%d}| = %.3g",
                                      d, max_comm, wit_j, wit_k, wit_k, wit_j, max_asym);
                        report.witness = buf;
                    }
                } else {
                    ++stats.failures;
                }
            } else {
                ++stats.boundary;
            }
        }
        report.total_failures += stats.failures;
        report.per_dim.push_back(stats);
    }
    return report;
}

// ---------------------------------------------------------------------------
// margenau_check
// ---------------------------------------------------------------------------

MarginalCheck margenau_check(const Vec& psi, const ProjectorFamily& p,
                             const ProjectorFamily& q) {
    const int d = p.dim();
    if (q.dim() != d || psi.size() != d)
        throw QuantumError("margenau check: dimension mismatch");
    if (std::abs(psi.norm() - 1.0) > kHermTol * d)
        throw QuantumError("margenau check: state vector is not normalized");

    MarginalCheck mc;
    mc.lhs.resize(static_cast<size_t>(d));
    mc.dephased.resize(static_cast<size_t>(d));
    mc.direct.resize(static_cast<size_t>(d));

    // The state after the intermediate observation happened but nobody
    // recorded which outcome: coherences between the p-branches are gone.
    Mat rho_p = Mat::Zero(d, d);
    for (int t = 0; t < d; ++t)
        rho_p += p.projector(t) * (psi * psi.adjoint()) * p.projector(t);

    for (int k = 0; k < d; ++k) {
        double lhs = 0;
        for (int t = 0; t < d; ++t) {
            const double overlap = std::norm(q.vector(k).dot(p.vector(t)));
            const double weight = std::norm(p.vector(t).dot(psi));
            lhs += overlap * weight;
        }
        mc.lhs[static_cast<size_t>(k)] = lhs;
        const std::complex<double> deph =
            (q.vector(k).adjoint() * rho_p * q.vector(k))(0, 0);
        mc.dephased[static_cast<size_t>(k)] = deph.real();
        mc.direct[static_cast<size_t>(k)] = std::norm(q.vector(k).dot(psi));

        mc.max_lhs_vs_dephased =
            std::max(mc.max_lhs_vs_dephased, std::abs(lhs - deph.real()));
        mc.max_lhs_vs_direct =
            std::max(mc.max_lhs_vs_direct,
                     std::abs(lhs - mc.direct[static_cast<size_t>(k)]));
    }
    if (mc.max_lhs_vs_dephased > 1e-10)
        throw QuantumError("branch sum and dephased state disagree; this is "
                           "algebraically impossible and indicates a numeric bug");
    return mc;
}

}  // namespace decklab::quantum
