#include "bofop/wl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bofop/ot.hpp"

namespace bofop {

namespace {

constexpr double kIdmTolerance = 1e-12;

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool close(const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > kIdmTolerance) return false;
    return true;
}

using Signature = IdmClass;

bool signature_less(const Signature& a, const Signature& b) {
    if (a.truncation != b.truncation) return a.truncation < b.truncation;
    return a.measure < b.measure;
}

bool signature_equal(const Signature& a, const Signature& b) {
    if (a.truncation != b.truncation || a.measure.size() != b.measure.size()) return false;
    for (std::size_t t = 0; t < a.measure.size(); ++t) {
        if (a.measure[t].first != b.measure[t].first) return false;
        if (std::abs(a.measure[t].second - b.measure[t].second) > kIdmTolerance) return false;
    }
    return true;
}

// Sorts node keys, merges neighbours that compare equal and returns the class
// list plus each node's class id. `less` must order keys by content only.
template <class Key, class Less, class Equal>
std::pair<std::vector<Key>, std::vector<std::size_t>> hash_cons(const std::vector<Key>& keys, Less less,
                                                                Equal equal) {
    std::vector<std::size_t> order(keys.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return less(keys[x], keys[y]); });
    std::vector<Key> classes;
    std::vector<std::size_t> ids(keys.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const std::size_t node = order[pos];
        if (classes.empty() || !equal(classes.back(), keys[node])) classes.push_back(keys[node]);
        ids[node] = classes.size() - 1;
    }
    return {std::move(classes), std::move(ids)};
}

}  // namespace

double IdmClass::mass() const {
    double s = 0.0;
    for (const auto& [id, w] : measure) s += w;
    return s;
}

std::vector<double> Didm::class_weights(std::size_t level) const {
    std::vector<double> out(levels.at(level).size(), 0.0);
    // Summed in class order, then by weight, so the result is independent of
    // the vertex order.
    std::vector<std::pair<std::size_t, double>> parts;
    for (std::size_t i = 0; i < n(); ++i) parts.emplace_back(node_class[level][i], node_weights[i]);
    std::sort(parts.begin(), parts.end());
    for (const auto& [c, w] : parts) out[c] += w;
    return out;
}

Didm compute_idms(const FiniteBofopSignal& b, std::size_t depth) {
    const std::size_t n = b.n();
    Didm out;
    out.depth = depth;
    out.d = b.d();
    out.node_weights = b.vertex_weights();

    std::vector<IdmClass> level0(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = b.features().row(i);
        level0[i].feature.assign(row.begin(), row.end());
    }
    auto [classes0, ids0] = hash_cons(
        level0, [](const IdmClass& x, const IdmClass& y) { return lex_less(x.feature, y.feature); },
        [](const IdmClass& x, const IdmClass& y) { return close(x.feature, y.feature); });
    out.levels.push_back(std::move(classes0));
    out.node_class.push_back(std::move(ids0));

    for (std::size_t j = 1; j <= depth; ++j) {
        const auto& prev = out.node_class[j - 1];
        std::vector<Signature> sigs(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::pair<std::size_t, double>> parts;
            for (std::size_t t = 0; t < n; ++t) {
                const double k = b.kernel()(i, t);
                if (k != 0.0) parts.emplace_back(prev[t], k);
            }
            std::sort(parts.begin(), parts.end());
            auto& m = sigs[i].measure;
            for (const auto& [c, w] : parts) {
                if (!m.empty() && m.back().first == c) {
                    m.back().second += w;
                } else {
                    m.emplace_back(c, w);
                }
            }
            sigs[i].truncation = prev[i];
        }
        auto [classes, ids] = hash_cons(sigs, signature_less, signature_equal);
        out.levels.push_back(std::move(classes));
        out.node_class.push_back(std::move(ids));
    }
    return out;
}

Matrix idm_distance_table(const Didm& a, const Didm& b, std::size_t level) {
    if (a.d != b.d) {
        throw std::invalid_argument("idm_distance: feature dimensions differ (" + std::to_string(a.d) + " vs " +
                                    std::to_string(b.d) + ")");
    }
    if (level > a.depth || level > b.depth) {
        throw std::invalid_argument("idm_distance: level " + std::to_string(level) + " exceeds computed depth");
    }
    const auto& la = a.levels[0];
    const auto& lb = b.levels[0];
    Matrix table(la.size(), lb.size());
    for (std::size_t x = 0; x < la.size(); ++x)
        for (std::size_t y = 0; y < lb.size(); ++y) table(x, y) = l2_distance(la[x].feature, lb[y].feature);

    for (std::size_t j = 1; j <= level; ++j) {
        const auto& ca = a.levels[j];
        const auto& cb = b.levels[j];
        Matrix next(ca.size(), cb.size());
        for (std::size_t x = 0; x < ca.size(); ++x) {
            std::vector<double> wa;
            for (const auto& [id, w] : ca[x].measure) wa.push_back(w);
            for (std::size_t y = 0; y < cb.size(); ++y) {
                std::vector<double> wb;
                Matrix cost(ca[x].measure.size(), cb[y].measure.size());
                for (const auto& [id, w] : cb[y].measure) wb.push_back(w);
                for (std::size_t s = 0; s < ca[x].measure.size(); ++s)
                    for (std::size_t t = 0; t < cb[y].measure.size(); ++t)
                        cost(s, t) = table(ca[x].measure[s].first, cb[y].measure[t].first);
                next(x, y) = table(ca[x].truncation, cb[y].truncation) + ot_unbalanced(wa, wb, cost);
            }
        }
        table = std::move(next);
    }
    return table;
}

double idm_distance(const Didm& a, std::size_t i, const Didm& b, std::size_t j, std::size_t level) {
    if (i >= a.n() || j >= b.n()) throw std::invalid_argument("idm_distance: node index out of range");
    const Matrix table = idm_distance_table(a, b, level);
    return table(a.node_class[level][i], b.node_class[level][j]);
}

double didm_movers_distance(const Didm& a, const Didm& b) {
    if (a.depth != b.depth) throw std::invalid_argument("didm_movers_distance: depth mismatch");
    const Matrix table = idm_distance_table(a, b, a.depth);
    return ot_unbalanced(a.class_weights(a.depth), b.class_weights(b.depth), table);
}

double didm_movers_distance(const FiniteBofopSignal& a, const FiniteBofopSignal& b, std::size_t depth) {
    if (a.d() != b.d()) throw std::invalid_argument("didm_movers_distance: feature dimensions differ");
    return didm_movers_distance(compute_idms(a, depth), compute_idms(b, depth));
}

double idm_diameter_bound(std::size_t d, double r, std::size_t depth) {
    double bound = 2.0 * std::sqrt(static_cast<double>(d));
    for (std::size_t j = 1; j <= depth; ++j) bound = (1.0 + r) * bound + r;
    return bound;
}

std::vector<std::vector<std::size_t>> ColorRefiner::refine(const FiniteBofopSignal& b, std::size_t rounds) {
    const std::size_t n = b.n();
    double unit = 0.0;
    for (double x : b.kernel().data()) {
        if (x == 0.0) continue;
        if (unit == 0.0) unit = x;
        if (x != unit) throw std::invalid_argument("classical WL: kernel is weighted; use the IDM refinement instead");
    }
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t c = 0; c < b.d(); ++c) {
            if (b.features()(i, c) != b.features()(0, c)) {
                throw std::invalid_argument("classical WL: features must be constant");
            }
        }
    }

    std::vector<std::vector<std::size_t>> colors;
    const auto lookup = [this](std::size_t prev, std::vector<std::size_t> nbrs) {
        auto key = std::make_pair(prev, std::move(nbrs));
        const auto it = dictionary_.find(key);
        if (it != dictionary_.end()) return it->second;
        const std::size_t fresh = dictionary_.size();
        dictionary_.emplace(std::move(key), fresh);
        return fresh;
    };
    colors.emplace_back(n, lookup(static_cast<std::size_t>(-1), {}));
    for (std::size_t t = 1; t <= rounds; ++t) {
        const auto& prev = colors.back();
        std::vector<std::size_t> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::size_t> nbrs;
            for (std::size_t j = 0; j < n; ++j)
                if (b.kernel()(i, j) != 0.0) nbrs.push_back(prev[j]);
            std::sort(nbrs.begin(), nbrs.end());
            next[i] = lookup(prev[i], std::move(nbrs));
        }
        colors.push_back(std::move(next));
    }
    return colors;
}

std::vector<std::vector<std::size_t>> classical_wl_partition(const FiniteBofopSignal& b, std::size_t rounds) {
    ColorRefiner refiner;
    return refiner.refine(b, rounds);
}

std::vector<std::size_t> color_histogram(const std::vector<std::size_t>& colors) {
    std::vector<std::size_t> h = colors;
    std::sort(h.begin(), h.end());
    return h;
}

}  // namespace bofop
