// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "remat/errors.hpp"

namespace remat {

/// One layer of a non-homogeneous chain: forward cost, hidden-state size
/// and working (internal) size.
struct Layer {
    double u = 1.0;
    int s = 1;
    int p = 1;

    bool operator==(const Layer&) const = default;
};

/// Layers are 1-based in every formula: layer i is `layers[i - 1]`.
class ChainSpec {
public:
    ChainSpec() = default;
    explicit ChainSpec(std::vector<Layer> layers) : layers_(std::move(layers)) {
        if (layers_.empty()) throw ValidationError("chain has no layers");
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            const Layer& l = layers_[i];
            if (!(l.u > 0.0) || l.s < 1 || l.p < 1) {
                throw ValidationError("layer " + std::to_string(i + 1) + ": u, s and p must be positive");
            }
        }
    }

    static ChainSpec homogeneous(int n, double u = 1.0, int s = 1, int p = 1) {
        return ChainSpec(std::vector<Layer>(static_cast<std::size_t>(n), Layer{u, s, p}));
    }

    int size() const noexcept { return static_cast<int>(layers_.size()); }
    const Layer& layer(int i) const { return layers_.at(static_cast<std::size_t>(i - 1)); }
    const std::vector<Layer>& layers() const noexcept { return layers_; }

    int max_working_size() const {
        int best = 0;
        for (const auto& l : layers_) best = std::max(best, l.p);
        return best;
    }

    bool operator==(const ChainSpec&) const = default;

private:
    std::vector<Layer> layers_;
};

/// `{"layers": [{"u": 1.5, "s": 2, "p": 3}, ...]}`
inline ChainSpec parse_chain_spec(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("document", e.what());
    }
    if (!doc.is_object() || !doc.contains("layers")) throw ParseError("layers", "missing");
    const auto& arr = doc["layers"];
    if (!arr.is_array()) throw ParseError("layers", "expected an array");
    std::vector<Layer> layers;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& rec = arr[i];
        const std::string where = "layers[" + std::to_string(i) + "]";
        if (!rec.is_object()) throw ParseError(where, "expected an object");
        for (const char* f : {"u", "s", "p"}) {
            if (!rec.contains(f)) throw ParseError(where + "." + f, "missing");
        }
        if (!rec["u"].is_number()) throw ParseError(where + ".u", "expected a number");
        if (!rec["s"].is_number_integer()) throw ParseError(where + ".s", "expected an integer");
        if (!rec["p"].is_number_integer()) throw ParseError(where + ".p", "expected an integer");
        layers.push_back(Layer{rec["u"].get<double>(), rec["s"].get<int>(), rec["p"].get<int>()});
    }
    return ChainSpec(std::move(layers));
}

inline ChainSpec load_chain_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open chain file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_chain_spec(ss.str());
}

/// U(x, y): forward cost of layers x+1..x+y.
inline double cumulative_cost(const ChainSpec& chain, int x, int y) {
    if (x < 0 || y < 1 || x + y > chain.size()) {
        throw std::invalid_argument("cumulative_cost: span out of range");
    }
    double total = 0.0;
    for (int i = x + 1; i <= x + y; ++i) total += chain.layer(i).u;
    return total;
}

/// K(x, y, m): 0 if every working state over layers x+1..x+y fits in m, else infinity.
inline double feasibility_gate(const ChainSpec& chain, int x, int y, int m) {
    if (x < 0 || y < 1 || x + y > chain.size()) {
        throw std::invalid_argument("feasibility_gate: span out of range");
    }
    for (int i = x + 1; i <= x + y; ++i) {
        if (chain.layer(i).p > m) return std::numeric_limits<double>::infinity();
    }
    return 0.0;
}

struct HeteroOptions {
    int max_layers = 512;
    bool force = false;
};

/// Optimal hidden-state checkpointing tables for a heterogeneous chain.
///
/// cost(t, m, x) is the cheapest way to backpropagate layers x+1..x+t when
/// the hidden state at x is stored and m units are available including it.
class HeteroPolicy {
public:
    HeteroPolicy(ChainSpec chain, int m_max)
        : chain_(std::move(chain)), n_(chain_.size()), m_max_(m_max),
          cost_(extent(), std::numeric_limits<double>::infinity()), split_(extent(), 0) {}

    const ChainSpec& chain() const noexcept { return chain_; }
    int m_max() const noexcept { return m_max_; }

    double cost(int t, int m, int x) const {
        if (t <= 0 || x + t > n_) return 0.0;
        if (m < 0) return std::numeric_limits<double>::infinity();
        check(m, x);
        return cost_[index(t, m, x)];
    }

    /// Layer offset of the first checkpoint; 0 for the boundary strategies.
    int split(int t, int m, int x) const {
        if (t <= 0 || x + t > n_ || m < 0) return 0;
        check(m, x);
        return split_[index(t, m, x)];
    }

private:
    friend HeteroPolicy solve_hetero(const ChainSpec&, int, const HeteroOptions&);

    std::size_t extent() const {
        const auto n1 = static_cast<std::size_t>(n_ + 1);
        return n1 * n1 * static_cast<std::size_t>(m_max_ + 1);
    }
    std::size_t index(int t, int m, int x) const {
        const auto n1 = static_cast<std::size_t>(n_ + 1);
        return (static_cast<std::size_t>(m) * n1 + static_cast<std::size_t>(x)) * n1 + static_cast<std::size_t>(t);
    }
    void check(int m, int x) const {
        if (m > m_max_ || x < 0) throw std::out_of_range("HeteroPolicy: index out of range");
    }

    ChainSpec chain_;
    int n_;
    int m_max_;
    std::vector<double> cost_;
    std::vector<int> split_;
};

/// O(N^3 m) bottom-up build over t. Refuses chains longer than
/// `opts.max_layers` unless `opts.force`.
inline HeteroPolicy solve_hetero(const ChainSpec& chain, int m_max, const HeteroOptions& opts = {}) {
    const int n = chain.size();
    if (n < 1) throw ValidationError("chain has no layers");
    if (m_max < 1) throw ConfigError("m_max must be >= 1");
    if (n > opts.max_layers && !opts.force) {
        throw LimitError("chain of " + std::to_string(n) + " layers exceeds the cap of " +
                         std::to_string(opts.max_layers) + "; force to build anyway");
    }
    const int need = chain.max_working_size();
    if (need > m_max) {
        throw InfeasibleError("a layer's working state does not fit in m_max; smallest admissible m is " +
                                  std::to_string(need),
                              need);
    }

    HeteroPolicy pol(chain, m_max);
    const double inf = std::numeric_limits<double>::infinity();

    // prefix sums: u, i*u-weighted, s
    std::vector<double> pu(static_cast<std::size_t>(n + 1), 0.0), ppu(pu);
    std::vector<long long> ps(static_cast<std::size_t>(n + 1), 0);
    for (int i = 1; i <= n; ++i) {
        pu[i] = pu[i - 1] + chain.layer(i).u;
        ppu[i] = ppu[i - 1] + pu[i];
        ps[i] = ps[i - 1] + chain.layer(i).s;
    }
    auto U = [&](int x, int y) { return pu[x + y] - pu[x]; };

    for (int t = 1; t <= n; ++t) {
        for (int m = 0; m <= m_max; ++m) {
            for (int x = 0; x + t <= n; ++x) {
                int span_p = 0;
                for (int i = x + 1; i <= x + t; ++i) span_p = std::max(span_p, chain.layer(i).p);
                const bool gate = span_p <= m;

                double best = inf;
                int arg = 0;
                if (gate && ps[x + t] - ps[x] <= m) {
                    best = chain.layer(x + t).u + 2.0 * (pu[x + t - 1] - pu[x]);
                } else {
                    if (gate) best = (ppu[x + t] - ppu[x]) - t * pu[x];
                    int run_p = 0;
                    for (int y = 1; y < t; ++y) {
                        run_p = std::max(run_p, chain.layer(x + y).p);
                        if (run_p > m) break;
                        const int rest = m - chain.layer(x + y).s;
                        if (rest < 0) continue;
                        const double q = U(x, y) + pol.cost(t - y, rest, x + y) + pol.cost(y, m, x);
                        if (q < best) {
                            best = q;
                            arg = y;
                        }
                    }
                }
                pol.cost_[pol.index(t, m, x)] = best;
                pol.split_[pol.index(t, m, x)] = arg;
            }
        }
    }
    if (pol.cost(n, m_max, 0) == inf) {
        throw InfeasibleError("chain cannot be backpropagated within m_max; smallest admissible m is " +
                                  std::to_string(need),
                              need);
    }
    return pol;
}

}  // namespace remat
