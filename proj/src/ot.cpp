#include "bofop/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "bofop/transport.hpp"

namespace bofop {

GroundMetric GroundMetric::recursive(Matrix costs) {
    for (double c : costs.data()) {
        if (!std::isfinite(c) || c < 0.0) {
            throw std::invalid_argument("GroundMetric::recursive: costs must be finite and nonnegative");
        }
    }
    GroundMetric g(Kind::Recursive);
    g.costs_ = std::move(costs);
    return g;
}

GroundMetric GroundMetric::transposed() const {
    GroundMetric g(kind_);
    if (kind_ == Kind::Recursive) g.costs_ = costs_.transposed();
    return g;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

double l2_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

Matrix GroundMetric::cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const {
    if (kind_ == Kind::Recursive) {
        if (costs_.rows() != mu.size() || costs_.cols() != nu.size()) {
            throw std::invalid_argument("GroundMetric: recursive cost matrix shape does not match the measures");
        }
        return costs_;
    }
    if (mu.dim() != nu.dim()) {
        throw std::invalid_argument("GroundMetric: ambient dimension mismatch (" + std::to_string(mu.dim()) +
                                    " vs " + std::to_string(nu.dim()) + ")");
    }
    Matrix c(mu.size(), nu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        for (std::size_t j = 0; j < nu.size(); ++j) {
            c(i, j) = kind_ == Kind::L1 ? l1_distance(mu.atom(i), nu.atom(j)) : l2_distance(mu.atom(i), nu.atom(j));
        }
    }
    return c;
}

double ot_unbalanced(std::span<const double> mu_weights, std::span<const double> nu_weights, const Matrix& cost) {
    if (cost.rows() != mu_weights.size() || cost.cols() != nu_weights.size()) {
        throw std::invalid_argument("ot_unbalanced: cost matrix shape mismatch");
    }
    for (std::span<const double> ws : {mu_weights, nu_weights}) {
        for (double w : ws) {
            if (std::isnan(w) || w < 0.0) throw std::invalid_argument("ot_unbalanced: NaN or negative weight");
        }
    }
    const double mass_mu = std::accumulate(mu_weights.begin(), mu_weights.end(), 0.0);
    const double mass_nu = std::accumulate(nu_weights.begin(), nu_weights.end(), 0.0);
    if (mass_mu > mass_nu) return ot_unbalanced(nu_weights, mu_weights, cost.transposed());

    const double gap = mass_nu - mass_mu;
    if (mass_mu == 0.0) return gap;

    // Virtual source carrying the surplus of nu at zero cost; the sub-coupling
    // of the lighter measure is the restriction to the real sources.
    std::vector<double> supply(mu_weights.begin(), mu_weights.end());
    Matrix extended(cost.rows() + 1, cost.cols(), 0.0);
    for (std::size_t i = 0; i < cost.rows(); ++i) {
        std::copy(cost.row(i).begin(), cost.row(i).end(), extended.row(i).begin());
    }
    supply.push_back(gap);
    const TransportSolution sol = solve_transport(supply, nu_weights, extended);
    return sol.cost + gap;
}

double ot_unbalanced(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const GroundMetric& ground) {
    if (ground.kind() != GroundMetric::Kind::Recursive && mu.dim() != nu.dim()) {
        throw std::invalid_argument("ot_unbalanced: ambient dimension mismatch");
    }
    return ot_unbalanced(mu.weights(), nu.weights(), ground.cost_matrix(mu, nu));
}

double hausdorff_from_table(const Matrix& distances) {
    if (distances.rows() == 0 || distances.cols() == 0) {
        throw std::invalid_argument("hausdorff: both sets must be nonempty");
    }
    double forward = 0.0;
    for (std::size_t i = 0; i < distances.rows(); ++i) {
        const auto row = distances.row(i);
        forward = std::max(forward, *std::min_element(row.begin(), row.end()));
    }
    double backward = 0.0;
    for (std::size_t j = 0; j < distances.cols(); ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < distances.rows(); ++i) best = std::min(best, distances(i, j));
        backward = std::max(backward, best);
    }
    return std::max(forward, backward);
}

double hausdorff_set_distance(std::span<const DiscreteMeasure> set_a, std::span<const DiscreteMeasure> set_b,
                              const GroundMetric& ground) {
    if (set_a.empty() || set_b.empty()) throw std::invalid_argument("hausdorff_set_distance: empty set");
    Matrix table(set_a.size(), set_b.size());
    for (std::size_t i = 0; i < set_a.size(); ++i) {
        for (std::size_t j = 0; j < set_b.size(); ++j) table(i, j) = ot_unbalanced(set_a[i], set_b[j], ground);
    }
    return hausdorff_from_table(table);
}

double kr_lower_bound(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                      const std::function<double(std::span<const double>)>& test_fn) {
    const double a = mu.total_mass();
    const double b = nu.total_mass();
    if (std::abs(a - b) > 1e-12 * std::max({a, b, 1.0})) {
        throw std::invalid_argument("kr_lower_bound: measures must have equal mass");
    }
    if (mu.dim() != nu.dim()) throw std::invalid_argument("kr_lower_bound: dimension mismatch");
    return mu.integrate(test_fn) - nu.integrate(test_fn);
}

double wasserstein_box_diameter(std::span<const double> half_widths) {
    double s = 0.0;
    for (double c : half_widths) s += 2.0 * c;
    return s;
}

}  // namespace bofop
