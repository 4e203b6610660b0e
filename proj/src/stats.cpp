#include "decklab/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <stdexcept>

namespace decklab {

namespace {

double survival(double stat, double dof) {
    if (dof <= 0) return 1.0;
    boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace

Chi2Result chi2_goodness(const std::vector<long long>& counts,
                         const std::vector<double>& expected_probs) {
    if (counts.size() != expected_probs.size())
        throw std::invalid_argument("chi2_goodness: size mismatch");
    long long n = 0;
    for (long long c : counts) n += c;
    if (n == 0) throw std::invalid_argument("chi2_goodness: no observations");

    Chi2Result r;
    for (size_t i = 0; i < counts.size(); ++i) {
        const double expect = expected_probs[i] * static_cast<double>(n);
        if (expect <= 0.0) {
            if (counts[i] != 0)
                throw std::invalid_argument("chi2_goodness: observation in zero-probability cell");
            continue;
        }
        const double d = static_cast<double>(counts[i]) - expect;
        r.stat += d * d / expect;
        r.dof += 1.0;
    }
    r.dof -= 1.0;
    r.p_value = survival(r.stat, r.dof);
    return r;
}

Chi2Result chi2_uniform(const std::vector<long long>& counts) {
    return chi2_goodness(counts,
                         std::vector<double>(counts.size(), 1.0 / static_cast<double>(counts.size())));
}

Chi2Result chi2_homogeneity(const std::vector<long long>& a, const std::vector<long long>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("chi2_homogeneity: size mismatch");
    double na = 0, nb = 0;
    for (long long c : a) na += static_cast<double>(c);
    for (long long c : b) nb += static_cast<double>(c);
    if (na == 0 || nb == 0)
        throw std::invalid_argument("chi2_homogeneity: empty sample");

    Chi2Result r;
    const double grand = na + nb;
    for (size_t i = 0; i < a.size(); ++i) {
        const double col = static_cast<double>(a[i] + b[i]);
        if (col == 0.0) continue;
        const double ea = na * col / grand;
        const double eb = nb * col / grand;
        const double da = static_cast<double>(a[i]) - ea;
        const double db = static_cast<double>(b[i]) - eb;
        r.stat += da * da / ea + db * db / eb;
        r.dof += 1.0;
    }
    r.dof -= 1.0;
    r.p_value = survival(r.stat, r.dof);
    return r;
}

}  // namespace decklab
