#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gibbsflow/geometry.hpp"
#include "gibbsflow/interaction.hpp"
#include "gibbsflow/noise.hpp"
#include "gibbsflow/stats.hpp"

namespace gibbsflow {

/// Homogeneous Poisson process of intensity z on w, indexed at `index_range`.
Configuration sample_poisson(double z, const Window& w, CounterRng& rng, double index_range = 1.0);
Configuration sample_poisson(double z, const Window& w, const SeedSpec& seed, double index_range = 1.0);

struct GibbsSampleSpec {
    Window window;
    InteractionSpec interaction;
    /// Frozen points in dilate(window, R) \ window; nullopt is the empty boundary.
    std::optional<Configuration> boundary;
    double burn_in = 20.0;
    std::size_t n_samples = 100;
    double spacing = 5.0;
    /// Intensity of the Poisson start.
    double initial_intensity = 1.0;

    void validate() const;
};

struct GibbsChain {
    std::vector<Configuration> samples;
    /// Autocorrelation of the window count at the lag covering 10 time units.
    double autocorrelation = 0.0;
    std::size_t autocorrelation_lag = 0;
    /// Set when that autocorrelation is not below 0.1.
    bool mixing_flag = false;
};

/// States of one long frozen-boundary chain started from a Poisson sample,
/// recorded every `spacing` after `burn_in`.
GibbsChain sample_gibbs(const GibbsSampleSpec& gspec, const SeedSpec& seed);

/// f(x, eta) with the support of x declared.
struct TestFunction {
    std::string name;
    std::function<double(const Point&, const Configuration&)> fn;
    Window support;
};

/// Five probes supported on the window minus its R-collar.
std::vector<TestFunction> default_test_functions(const Window& window, double range);

/// Per test function: the sample mean of
///   sum_{x in eta} f(x, eta - x) - int b(x, eta) f(x, eta) dx
/// with the integral by a midpoint grid of the given step (default R/50).
/// Throws when a support comes within R of the window boundary.
std::vector<Estimate> gnz_residual(std::span<const Configuration> samples,
                                   std::span<const TestFunction> tests, const InteractionSpec& spec,
                                   const Window& window, std::optional<double> step = std::nullopt);

/// One CSV per sample plus index.json.
void write_samples(const std::filesystem::path& dir, std::span<const Configuration> samples);

}  // namespace gibbsflow
