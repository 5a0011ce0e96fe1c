// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "remat/errors.hpp"
#include "remat/executor.hpp"
#include "remat/policy_table.hpp"
#include "remat/types.hpp"

namespace remat {

using Vec = std::vector<double>;

/// Parameters of h_k = tanh(W h_{k-1} + U x_k + b).
struct RefCellConfig {
    int hidden_dim = 4;
    int input_dim = 3;
    std::uint64_t seed = 42;
    double scale = 0.5;
};

struct ParamGrads {
    Vec dW, dU, db;

    bool operator==(const ParamGrads&) const = default;
};

/// Small tanh recurrent cell. The output at each position is the hidden
/// state itself and the loss is the sum of squared outputs.
class RefCell {
public:
    struct Core {
        Vec preact;
        Vec hidden;

        bool operator==(const Core&) const = default;
    };

    explicit RefCell(const RefCellConfig& cfg = {})
        : h_(cfg.hidden_dim), x_(cfg.input_dim) {
        if (h_ < 1 || x_ < 1) throw ConfigError("RefCell: dimensions must be >= 1");
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> dist(-cfg.scale, cfg.scale);
        W_.resize(static_cast<std::size_t>(h_ * h_));
        U_.resize(static_cast<std::size_t>(h_ * x_));
        b_.resize(static_cast<std::size_t>(h_));
        for (auto& v : W_) v = dist(rng);
        for (auto& v : U_) v = dist(rng);
        for (auto& v : b_) v = dist(rng);
    }

    int hidden_dim() const noexcept { return h_; }
    int input_dim() const noexcept { return x_; }

    Vec& W() noexcept { return W_; }
    Vec& U() noexcept { return U_; }
    Vec& b() noexcept { return b_; }
    const Vec& W() const noexcept { return W_; }
    const Vec& U() const noexcept { return U_; }
    const Vec& b() const noexcept { return b_; }

    /// An internal state holds the pre-activation, the new hidden state and
    /// the input hidden state; without the input it is two hidden units.
    CostModel cost_model() const { return CostModel{3, 2, 2.0}; }

    ParamGrads zero_grads() const {
        return ParamGrads{Vec(W_.size(), 0.0), Vec(U_.size(), 0.0), Vec(b_.size(), 0.0)};
    }

    Core forward(const Vec& x, const Vec& h) const {
        Core c{Vec(static_cast<std::size_t>(h_)), Vec(static_cast<std::size_t>(h_))};
        for (int i = 0; i < h_; ++i) {
            double a = b_[i];
            for (int j = 0; j < h_; ++j) a += W_[i * h_ + j] * h[j];
            for (int j = 0; j < x_; ++j) a += U_[i * x_ + j] * x[j];
            c.preact[i] = a;
            c.hidden[i] = std::tanh(a);
        }
        return c;
    }

    /// Backward through one step. `grad_out` and `grad_h` are both
    /// gradients with respect to the new hidden state.
    std::pair<Vec, Vec> backward(const Core& c, const Vec& x, const Vec& h_prev, const Vec& grad_out,
                                 const Vec& grad_h, ParamGrads& acc) const {
        Vec da(static_cast<std::size_t>(h_));
        for (int i = 0; i < h_; ++i) {
            da[i] = (grad_out[i] + grad_h[i]) * (1.0 - c.hidden[i] * c.hidden[i]);
        }
        Vec gx(static_cast<std::size_t>(x_), 0.0);
        Vec gh(static_cast<std::size_t>(h_), 0.0);
        for (int i = 0; i < h_; ++i) {
            for (int j = 0; j < h_; ++j) {
                acc.dW[i * h_ + j] += da[i] * h_prev[j];
                gh[j] += W_[i * h_ + j] * da[i];
            }
            for (int j = 0; j < x_; ++j) {
                acc.dU[i * x_ + j] += da[i] * x[j];
                gx[j] += U_[i * x_ + j] * da[i];
            }
            acc.db[i] += da[i];
        }
        return {std::move(gx), std::move(gh)};
    }

private:
    int h_;
    int x_;
    Vec W_, U_, b_;
};

/// Everything a backward pass over the chain produces.
struct Gradients {
    std::vector<Vec> grad_inputs;  ///< index k-1 for position k
    Vec grad_initial_hidden;
    ParamGrads params;
    double loss = 0.0;

    bool operator==(const Gradients&) const = default;
};

inline std::vector<Vec> seeded_inputs(int t, int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<Vec> xs(static_cast<std::size_t>(t), Vec(static_cast<std::size_t>(dim)));
    for (auto& x : xs) {
        for (auto& v : x) v = dist(rng);
    }
    return xs;
}

/// ChainTape over a RefCell. Loss and parameter gradients accumulate as the
/// executor walks backward.
class RefTape {
public:
    using hidden_type = Vec;
    using core_type = RefCell::Core;
    using input_type = Vec;
    using output_type = Vec;
    using grad_output_type = Vec;
    using grad_input_type = Vec;
    using grad_hidden_type = Vec;

    RefTape(const RefCell& cell, const std::vector<Vec>& inputs, Vec h0)
        : cell_(&cell), inputs_(&inputs), h0_(std::move(h0)), params_(cell.zero_grads()),
          grad_inputs_(inputs.size()) {
        if (static_cast<int>(h0_.size()) != cell.hidden_dim()) {
            throw ConfigError("RefTape: initial hidden state has the wrong size");
        }
    }

    int length() const { return static_cast<int>(inputs_->size()); }

    Vec initial_hidden() const { return h0_; }
    Vec get_input(int pos) const { return inputs_->at(static_cast<std::size_t>(pos - 1)); }
    core_type forward(const Vec& x, const Vec& h) const {
        ++forward_calls_;
        return cell_->forward(x, h);
    }
    Vec next_hidden(const core_type& c) const { return c.hidden; }
    Vec output(const core_type& c) const { return c.hidden; }

    Vec set_output_and_get_grad_output(int, Vec out) {
        Vec g(out.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            loss_ += out[i] * out[i];
            g[i] = 2.0 * out[i];
        }
        return g;
    }

    std::pair<Vec, Vec> backward(const core_type& c, const Vec& x, const Vec& h, const Vec& g_out,
                                 const Vec& g_h) {
        return cell_->backward(c, x, h, g_out, g_h, params_);
    }

    void set_grad_input(int pos, Vec g) { grad_inputs_.at(static_cast<std::size_t>(pos - 1)) = std::move(g); }

    std::uint64_t checksum(const Vec& h) const {
        std::uint64_t acc = 1469598103934665603ULL;
        for (double v : h) {
            std::uint64_t bits = 0;
            std::memcpy(&bits, &v, sizeof bits);
            acc = (acc ^ bits) * 1099511628211ULL;
        }
        return acc;
    }

    std::int64_t forward_calls() const noexcept { return forward_calls_; }

    Gradients take(Vec grad_h0) {
        return Gradients{std::move(grad_inputs_), std::move(grad_h0), std::move(params_), loss_};
    }

private:
    const RefCell* cell_;
    const std::vector<Vec>* inputs_;
    Vec h0_;
    ParamGrads params_;
    std::vector<Vec> grad_inputs_;
    double loss_ = 0.0;
    mutable std::int64_t forward_calls_ = 0;
};

/// Store-everything backpropagation through time.
inline Gradients full_bptt_reference(const RefCell& cell, const std::vector<Vec>& inputs, const Vec& h0) {
    const int t = static_cast<int>(inputs.size());
    std::vector<Vec> hs{h0};
    std::vector<RefCell::Core> cores;
    for (int k = 1; k <= t; ++k) {
        cores.push_back(cell.forward(inputs[k - 1], hs.back()));
        hs.push_back(cores.back().hidden);
    }
    Gradients g{std::vector<Vec>(inputs.size()), {}, cell.zero_grads(), 0.0};
    Vec gh(static_cast<std::size_t>(cell.hidden_dim()), 0.0);
    for (int k = t; k >= 1; --k) {
        const Vec& out = cores[k - 1].hidden;
        Vec g_out(out.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            g.loss += out[i] * out[i];
            g_out[i] = 2.0 * out[i];
        }
        auto [gx, gprev] = cell.backward(cores[k - 1], inputs[k - 1], hs[k - 1], g_out, gh, g.params);
        g.grad_inputs[k - 1] = std::move(gx);
        gh = std::move(gprev);
    }
    g.grad_initial_hidden = std::move(gh);
    return g;
}

/// Same gradients computed by executing `policy` within `budget`.
inline Gradients run_under_policy(const RefCell& cell, const std::vector<Vec>& inputs, const Vec& h0,
                                  const PolicyTable& policy, MemoryBudget budget,
                                  const ExecuteOptions& opts = {}, ExecutionTrace* trace = nullptr) {
    RefTape tape(cell, inputs, h0);
    Vec gh = execute(policy, tape, tape.length(), budget, Vec(static_cast<std::size_t>(cell.hidden_dim()), 0.0),
                     opts, trace);
    return tape.take(std::move(gh));
}

inline double chain_loss(const RefCell& cell, const std::vector<Vec>& inputs, const Vec& h0) {
    Vec h = h0;
    double loss = 0.0;
    for (const auto& x : inputs) {
        h = cell.forward(x, h).hidden;
        for (double v : h) loss += v * v;
    }
    return loss;
}

/// Central-difference estimate of the flattened gradient
/// [dW, dU, db, d inputs, d h0], same layout as flatten().
inline Vec finite_difference_gradient(RefCell cell, std::vector<Vec> inputs, Vec h0, double step = 1e-6) {
    Vec out;
    auto probe = [&](double& slot) {
        const double saved = slot;
        slot = saved + step;
        const double up = chain_loss(cell, inputs, h0);
        slot = saved - step;
        const double down = chain_loss(cell, inputs, h0);
        slot = saved;
        out.push_back((up - down) / (2.0 * step));
    };
    for (auto& v : cell.W()) probe(v);
    for (auto& v : cell.U()) probe(v);
    for (auto& v : cell.b()) probe(v);
    for (auto& x : inputs) {
        for (auto& v : x) probe(v);
    }
    for (auto& v : h0) probe(v);
    return out;
}

inline Vec flatten(const Gradients& g) {
    Vec out;
    auto append = [&](const Vec& v) { out.insert(out.end(), v.begin(), v.end()); };
    append(g.params.dW);
    append(g.params.dU);
    append(g.params.db);
    for (const auto& x : g.grad_inputs) append(x);
    append(g.grad_initial_hidden);
    return out;
}

/// ||a - b|| / max(||b||, tiny).
inline double relative_error(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw ValidationError("relative_error: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

}  // namespace remat
