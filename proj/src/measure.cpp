#include "bofop/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace bofop {

namespace {

void check_weight(double w) {
    if (std::isnan(w) || w < 0.0 || std::isinf(w)) {
        throw std::invalid_argument("DiscreteMeasure: weight must be finite and nonnegative, got " +
                                    std::to_string(w));
    }
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(std::size_t dim, std::vector<std::vector<double>> atoms,
                                 std::vector<double> weights)
    : dim_(dim) {
    if (atoms.size() != weights.size()) {
        throw std::invalid_argument("DiscreteMeasure: atom/weight count mismatch");
    }
    coords_.reserve(atoms.size() * dim);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].size() != dim) {
            throw std::invalid_argument("DiscreteMeasure: atom " + std::to_string(i) + " has dimension " +
                                        std::to_string(atoms[i].size()) + ", expected " + std::to_string(dim));
        }
        for (double x : atoms[i]) {
            if (!std::isfinite(x)) throw std::invalid_argument("DiscreteMeasure: non-finite coordinate");
        }
        check_weight(weights[i]);
        coords_.insert(coords_.end(), atoms[i].begin(), atoms[i].end());
    }
    weights_ = std::move(weights);
}

DiscreteMeasure DiscreteMeasure::dirac(std::vector<double> point, double mass) {
    const std::size_t dim = point.size();
    return DiscreteMeasure(dim, {std::move(point)}, {mass});
}

void DiscreteMeasure::add_atom(std::span<const double> point, double weight) {
    if (point.size() != dim_) throw std::invalid_argument("DiscreteMeasure::add_atom: dimension mismatch");
    check_weight(weight);
    coords_.insert(coords_.end(), point.begin(), point.end());
    weights_.push_back(weight);
}

double DiscreteMeasure::total_mass() const noexcept {
    return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

double DiscreteMeasure::integrate(const std::function<double(std::span<const double>)>& fn) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < size(); ++i) acc += weights_[i] * fn(atom(i));
    return acc;
}

std::vector<double> DiscreteMeasure::first_moment() const {
    std::vector<double> out(dim_, 0.0);
    for (std::size_t i = 0; i < size(); ++i) {
        const auto a = atom(i);
        for (std::size_t c = 0; c < dim_; ++c) out[c] += weights_[i] * a[c];
    }
    return out;
}

DiscreteMeasure DiscreteMeasure::canonical(double tolerance) const {
    std::vector<std::size_t> order;
    order.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
        if (weights_[i] > 0.0) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
        const auto pa = atom(a);
        const auto pb = atom(b);
        if (std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end())) return true;
        if (std::lexicographical_compare(pb.begin(), pb.end(), pa.begin(), pa.end())) return false;
        return a < b;
    });

    // Representatives are emitted in sorted order, so a candidate only needs to
    // be compared against representatives whose leading coordinate is within
    // tolerance of its own.
    DiscreteMeasure out(dim_);
    for (std::size_t idx : order) {
        const auto p = atom(idx);
        bool merged = false;
        for (std::size_t r = out.size(); r-- > 0;) {
            const auto rep = out.atom(r);
            if (dim_ > 0 && rep[0] < p[0] - tolerance) break;
            if (max_abs_diff(rep, p) <= tolerance) {
                out.weights_[r] += weights_[idx];
                merged = true;
                break;
            }
        }
        if (!merged) {
            out.coords_.insert(out.coords_.end(), p.begin(), p.end());
            out.weights_.push_back(weights_[idx]);
        }
    }
    return out;
}

DiscreteMeasure DiscreteMeasure::project(std::span<const std::size_t> coords) const {
    for (std::size_t c : coords) {
        if (c >= dim_) throw std::out_of_range("DiscreteMeasure::project: coordinate out of range");
    }
    DiscreteMeasure out(coords.size());
    out.weights_ = weights_;
    out.coords_.reserve(size() * coords.size());
    for (std::size_t i = 0; i < size(); ++i) {
        const auto a = atom(i);
        for (std::size_t c : coords) out.coords_.push_back(a[c]);
    }
    return out;
}

bool equivalent(const DiscreteMeasure& a, const DiscreteMeasure& b, double atom_tol, double weight_tol) {
    if (a.dim() != b.dim()) return false;
    const DiscreteMeasure ca = a.canonical(atom_tol);
    const DiscreteMeasure cb = b.canonical(atom_tol);
    if (ca.size() != cb.size()) return false;
    for (std::size_t i = 0; i < ca.size(); ++i) {
        if (max_abs_diff(ca.atom(i), cb.atom(i)) > atom_tol) return false;
        if (std::abs(ca.weight(i) - cb.weight(i)) > weight_tol) return false;
    }
    return true;
}

DiscreteMeasure pushforward_measure(const DiscreteMeasure& mu,
                                    const std::function<std::vector<double>(std::span<const double>)>& map,
                                    std::size_t empty_dim) {
    if (mu.empty()) return DiscreteMeasure(empty_dim);
    std::vector<std::vector<double>> atoms;
    std::vector<double> weights;
    atoms.reserve(mu.size());
    weights.reserve(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        atoms.push_back(map(mu.atom(i)));
        if (atoms.back().size() != atoms.front().size()) {
            throw std::invalid_argument("pushforward_measure: map output dimension varies across atoms");
        }
        weights.push_back(mu.weight(i));
    }
    const std::size_t dim = atoms.front().size();
    return DiscreteMeasure(dim, std::move(atoms), std::move(weights));
}

}  // namespace bofop
