#pragma once

#include <string>
#include <vector>

#include "gibbsflow/experiments.hpp"
#include "gibbsflow/interaction.hpp"
#include "gibbsflow/lattice.hpp"
#include "gibbsflow/noise.hpp"

namespace gibbsflow::detail {

using nlohmann::json;

inline SeedSpec seed_for(const RunContext& ctx, const std::string& tag) { return SeedSpec{ctx.seed, 0, tag}; }

std::vector<double> doubles(const json& j);
std::vector<int> ints(const json& j);

/// Dirichlet(1,...,1) draw: strictly positive, sums to 1.
std::vector<double> random_distribution(std::size_t n, CounterRng& rng);

/// One-dimensional area-interaction lattice surrogate with R = `range`.
LatticeModel area_line(int m, double cell_width, double alpha, double beta, double range);

std::string model_label(int m, double alpha, double beta);

ExperimentOutput run_debruijn(const json& p, const RunContext& ctx);
ExperimentOutput run_dissipation(const json& p, const RunContext& ctx);
ExperimentOutput run_strict_decrease(const json& p, const RunContext& ctx);
ExperimentOutput run_decay(const json& p, const RunContext& ctx);
ExperimentOutput run_series(const json& p, const RunContext& ctx);
ExperimentOutput run_reversibility(const json& p, const RunContext& ctx);
ExperimentOutput run_finite_time_gibbs(const json& p, const RunContext& ctx);
ExperimentOutput run_boundary_fisher(const json& p, const RunContext& ctx);
ExperimentOutput run_ideal_gas(const json& p, const RunContext& ctx);
ExperimentOutput run_gnz(const json& p, const RunContext& ctx);
ExperimentOutput run_finite_speed(const json& p, const RunContext& ctx);
ExperimentOutput run_correlations(const json& p, const RunContext& ctx);
ExperimentOutput run_variable_change(const json& p, const RunContext& ctx);
ExperimentOutput run_moments(const json& p, const RunContext& ctx);
ExperimentOutput run_ergodic(const json& p, const RunContext& ctx);

}  // namespace gibbsflow::detail
