#ifndef DECKLAB_STATS_HPP
#define DECKLAB_STATS_HPP

#include <vector>

namespace decklab {

struct Chi2Result {
    double stat = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
};

/// Goodness of fit against given expected probabilities (must sum to 1).
Chi2Result chi2_goodness(const std::vector<long long>& counts,
                         const std::vector<double>& expected_probs);

/// Goodness of fit against the uniform distribution over all cells.
Chi2Result chi2_uniform(const std::vector<long long>& counts);

/// Two-sample homogeneity on a pair of count vectors over the same cells.
/// Cells empty in both samples are dropped from the statistic.
Chi2Result chi2_homogeneity(const std::vector<long long>& a,
                            const std::vector<long long>& b);

}  // namespace decklab

#endif
