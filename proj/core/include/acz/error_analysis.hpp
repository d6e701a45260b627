#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "acz/rng.hpp"
#include "acz/tensor.hpp"

namespace acz {

/// Statistical evidence object for a batch of observed gradient errors.
struct ErrorDistributionReport {
    double empirical_sigma = 0.0;
    double within_one_sigma = 0.0; // fraction of errors in [-ref_sigma, +ref_sigma]
    std::vector<double> histogram_edges;  // 42 edges spanning [-5*ref, +5*ref]
    std::vector<std::uint64_t> histogram_counts; // 41 bins, clamped at the ends
    std::size_t sample_count = 0;
    std::uint64_t seed = 0;
    bool degenerate = false; // empirical sigma collapsed to zero

    std::string to_json() const;
    std::string histogram_csv() const;
};

/// One calibration sample for the sigma estimator coefficient.
struct SigmaObservation {
    double l_bar;   // mean |loss| per element
    double batch;   // batch size N
    double eb;      // injected error bound
    double r;       // nonzero ratio of the activation
    double sigma;   // measured gradient-error sigma
};

struct SigmaEstimate {
    double predicted_sigma;
    double l_bar, eb, r, a;
    double batch;
};

/// t + e with e ~ iid Uniform(-eb, +eb) from the seeded generator.
/// With preserve_zeros, elements that are exactly zero stay zero (a draw
/// is still consumed, so masked and unmasked runs share the same noise).
template <class T>
TensorT<T> inject_uniform_error(const TensorT<T>& t, double eb, bool preserve_zeros,
                                std::uint64_t seed) {
    if (!(eb > 0.0)) throw ParamError("inject_uniform_error: eb must be positive");
    Rng rng(seed);
    std::vector<T> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        double e = uniform_pm(rng, eb);
        out[i] = (preserve_zeros && t[i] == T(0)) ? T(0)
                                                  : static_cast<T>(static_cast<double>(t[i]) + e);
    }
    return TensorT<T>(t.shape(), std::move(out));
}

/// Exact standard deviation of one gradient element's error under the
/// uniform model: sqrt((eb^2/3) * sum L^2) / N, the sum running over loss
/// elements paired with nonzero (unmasked) activation positions.
/// `losses` is [N x ...]; N is its leading extent.
double exact_sigma(const DTensor& losses, double eb, const DTensor* nonzero_mask = nullptr);

/// The closed-form estimate a * L_bar * sqrt(N) * eb * sqrt(R).
SigmaEstimate predict_sigma(double l_bar, double batch, double eb, double r, double a);

/// Least-squares coefficient: a = sum(x*sigma) / sum(x^2) with
/// x = L_bar * sqrt(N) * eb * sqrt(R).
double fit_coefficient(const std::vector<SigmaObservation>& observations);

/// Empirical sigma, within-±reference fraction and a 41-bin histogram
/// over [-5*reference_sigma, +5*reference_sigma].
ErrorDistributionReport distribution_report(const std::vector<double>& errors,
                                            double reference_sigma);

} // namespace acz
