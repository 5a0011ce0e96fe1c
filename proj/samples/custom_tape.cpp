// SPDX-License-Identifier: Apache-2.0
//
// Runs an optimal schedule over a user-defined chain: a scalar running
// product h_k = h_{k-1} * x_k with loss = sum of h_k. Prints the gradient
// with respect to every input next to the store-everything answer.

#include <cstdio>
#include <utility>
#include <vector>

#include "remat/remat.hpp"

struct ProductTape {
    using hidden_type = double;
    using core_type = double;
    using input_type = double;
    using output_type = double;
    using grad_output_type = double;
    using grad_input_type = double;
    using grad_hidden_type = double;

    std::vector<double> xs;
    std::vector<double> grads;
    int forwards = 0;

    double initial_hidden() const { return 1.0; }
    double get_input(int pos) const { return xs[pos - 1]; }
    double forward(double x, double h) {
        ++forwards;
        return h * x;
    }
    double next_hidden(double core) const { return core; }
    double output(double core) const { return core; }
    double set_output_and_get_grad_output(int, double) const { return 1.0; }
    std::pair<double, double> backward(double, double x, double h, double g_out, double g_h) const {
        const double g = g_out + g_h;
        return {g * h, g * x};
    }
    void set_grad_input(int pos, double g) { grads[pos - 1] = g; }
};

int main() {
    const int t = 12;
    const int budget = 3;

    ProductTape tape;
    for (int i = 1; i <= t; ++i) tape.xs.push_back(1.0 + 0.05 * i);
    tape.grads.assign(t, 0.0);

    const auto policy = remat::solve_hsm(t, budget);
    remat::ExecutionTrace trace;
    remat::execute(policy, tape, t, remat::MemoryBudget(budget), 0.0, {}, &trace);

    std::printf("HSM t=%d m=%d: %lld forwards (table says %lld), peak %d units\n", t, budget,
                static_cast<long long>(trace.forward_ops), static_cast<long long>(policy.cost(t, budget).value()),
                trace.peak_memory_units);

    // d/dx_i sum_k prod_{j<=k} x_j = sum_{k>=i} prod_{j<=k, j!=i} x_j
    for (int i = 1; i <= t; ++i) {
        double expect = 0.0;
        for (int k = i; k <= t; ++k) {
            double prod = 1.0;
            for (int j = 1; j <= k; ++j) {
                if (j != i) prod *= tape.xs[j - 1];
            }
            expect += prod;
        }
        std::printf("x%-2d grad %.9f  closed form %.9f\n", i, tape.grads[i - 1], expect);
    }
    return 0;
}
