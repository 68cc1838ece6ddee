#include "bofop/signal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace bofop {

std::string_view to_string(Aggregation a) {
    switch (a) {
        case Aggregation::Sum: return "sum";
        case Aggregation::NormalizedSum: return "normalized_sum";
        case Aggregation::SymmetricAverage: return "symmetric_average";
    }
    return "sum";
}

Aggregation parse_aggregation(std::string_view name) {
    if (name == "sum") return Aggregation::Sum;
    if (name == "normalized_sum") return Aggregation::NormalizedSum;
    if (name == "symmetric_average") return Aggregation::SymmetricAverage;
    throw std::invalid_argument("unknown aggregation '" + std::string(name) + "'");
}

FiniteBofopSignal::FiniteBofopSignal(std::vector<double> vertex_weights, Matrix kernel, Matrix features)
    : vertex_weights_(std::move(vertex_weights)), kernel_(std::move(kernel)), features_(std::move(features)) {
    const std::size_t n = kernel_.rows();
    if (kernel_.cols() != n) throw std::invalid_argument("FiniteBofopSignal: kernel must be square");
    if (features_.rows() != n) {
        throw std::invalid_argument("FiniteBofopSignal: feature matrix has " + std::to_string(features_.rows()) +
                                    " rows, expected " + std::to_string(n));
    }
    if (vertex_weights_.size() != n) throw std::invalid_argument("FiniteBofopSignal: vertex weight count mismatch");
    for (double x : kernel_.data()) {
        if (!std::isfinite(x)) throw std::invalid_argument("FiniteBofopSignal: non-finite kernel entry");
    }
    for (double x : features_.data()) {
        if (!std::isfinite(x)) throw std::invalid_argument("FiniteBofopSignal: non-finite feature");
    }
    double total = 0.0;
    for (double w : vertex_weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("FiniteBofopSignal: vertex weights must be finite and nonnegative");
        }
        total += w;
    }
    if (n > 0 && std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("FiniteBofopSignal: vertex weights must sum to 1");
    }
}

namespace {

std::vector<double> uniform_weights(std::size_t n) {
    return std::vector<double>(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
}

}  // namespace

FiniteBofopSignal::FiniteBofopSignal(Matrix kernel, Matrix features)
    : FiniteBofopSignal(uniform_weights(kernel.rows()), std::move(kernel), std::move(features)) {}

FiniteBofopSignal FiniteBofopSignal::with_features(Matrix features) const {
    return FiniteBofopSignal(vertex_weights_, kernel_, std::move(features));
}

FiniteBofopSignal FiniteBofopSignal::permuted(const std::vector<std::size_t>& perm) const {
    const std::size_t count = n();
    if (perm.size() != count) throw std::invalid_argument("permuted: permutation size mismatch");
    std::vector<bool> seen(count, false);
    for (std::size_t p : perm) {
        if (p >= count || seen[p]) throw std::invalid_argument("permuted: not a permutation");
        seen[p] = true;
    }
    std::vector<double> w(count);
    Matrix k(count, count);
    Matrix f(count, d());
    for (std::size_t a = 0; a < count; ++a) {
        w[perm[a]] = vertex_weights_[a];
        for (std::size_t b = 0; b < count; ++b) k(perm[a], perm[b]) = kernel_(a, b);
        for (std::size_t c = 0; c < d(); ++c) f(perm[a], c) = features_(a, c);
    }
    return FiniteBofopSignal(std::move(w), std::move(k), std::move(f));
}

FiniteBofopSignal from_graph(std::size_t n, const std::vector<WeightedEdge>& edges, Matrix features,
                             Aggregation aggregation, std::optional<std::vector<double>> vertex_weights) {
    Matrix w(n, n, 0.0);
    std::map<std::pair<std::size_t, std::size_t>, double> seen;
    for (const auto& e : edges) {
        if (e.i >= n || e.j >= n) {
            throw std::invalid_argument("from_graph: edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                                        ") out of range for n = " + std::to_string(n));
        }
        if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
            throw std::invalid_argument("from_graph: edge weights must be finite and nonnegative");
        }
        const auto key = std::minmax(e.i, e.j);
        if (const auto it = seen.find(key); it != seen.end()) {
            if (it->second != e.weight) {
                throw std::invalid_argument("from_graph: pair (" + std::to_string(key.first) + ", " +
                                            std::to_string(key.second) + ") listed with conflicting weights");
            }
            continue;
        }
        seen.emplace(key, e.weight);
        w(e.i, e.j) = e.weight;
        w(e.j, e.i) = e.weight;
    }

    Matrix k(n, n, 0.0);
    switch (aggregation) {
        case Aggregation::Sum:
            k = w;
            break;
        case Aggregation::NormalizedSum:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) k(i, j) = w(i, j) / static_cast<double>(n);
            break;
        case Aggregation::SymmetricAverage: {
            std::vector<double> inv_sqrt_deg(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const auto row = w.row(i);
                const double deg = std::accumulate(row.begin(), row.end(), 0.0);
                inv_sqrt_deg[i] = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
            }
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) k(i, j) = inv_sqrt_deg[i] * w(i, j) * inv_sqrt_deg[j];
            break;
        }
    }
    if (vertex_weights) return FiniteBofopSignal(std::move(*vertex_weights), std::move(k), std::move(features));
    return FiniteBofopSignal(std::move(k), std::move(features));
}

double infty_norm(const FiniteBofopSignal& b) {
    double best = 0.0;
    for (std::size_t i = 0; i < b.n(); ++i) {
        double s = 0.0;
        for (double x : b.kernel().row(i)) s += std::abs(x);
        best = std::max(best, s);
    }
    return best;
}

Matrix apply_operator(const FiniteBofopSignal& b, const Matrix& signal) {
    if (signal.rows() != b.n()) {
        throw std::invalid_argument("apply_operator: signal has " + std::to_string(signal.rows()) +
                                    " rows, operator acts on " + std::to_string(b.n()));
    }
    Matrix out(b.n(), signal.cols(), 0.0);
    for (std::size_t i = 0; i < b.n(); ++i) {
        for (std::size_t j = 0; j < b.n(); ++j) {
            const double kij = b.kernel()(i, j);
            if (kij == 0.0) continue;
            for (std::size_t c = 0; c < signal.cols(); ++c) out(i, c) += kij * signal(j, c);
        }
    }
    return out;
}

double bilinear_form(const FiniteBofopSignal& b, const std::vector<double>& v, const std::vector<double>& u) {
    if (v.size() != b.n() || u.size() != b.n()) throw std::invalid_argument("bilinear_form: size mismatch");
    Matrix vm(b.n(), 1);
    for (std::size_t i = 0; i < b.n(); ++i) vm(i, 0) = v[i];
    const Matrix av = apply_operator(b, vm);
    double s = 0.0;
    for (std::size_t i = 0; i < b.n(); ++i) s += b.vertex_weights()[i] * av(i, 0) * u[i];
    return s;
}

ValidationReport validate_bofop(const FiniteBofopSignal& b, double tolerance) {
    ValidationReport report;
    const auto& w = b.vertex_weights();
    const Matrix& k = b.kernel();
    for (std::size_t a = 0; a < b.n(); ++a) {
        for (std::size_t c = 0; c < b.n(); ++c) {
            const double asym = std::abs(w[a] * k(a, c) - w[c] * k(c, a));
            report.self_adjoint.worst_violation = std::max(report.self_adjoint.worst_violation, asym);
            if (k(a, c) < 0.0) {
                report.positivity.worst_violation = std::max(report.positivity.worst_violation, -k(a, c));
            }
        }
    }
    for (double x : b.features().data()) {
        report.feature_range.worst_violation = std::max(report.feature_range.worst_violation, std::abs(x) - 1.0);
    }
    report.self_adjoint.pass = report.self_adjoint.worst_violation <= tolerance;
    report.positivity.pass = report.positivity.worst_violation == 0.0;
    report.feature_range.pass = report.feature_range.worst_violation <= 0.0;
    report.feature_range.worst_violation = std::max(0.0, report.feature_range.worst_violation);
    return report;
}

}  // namespace bofop
