#include "acz/error_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

namespace acz {

double exact_sigma(const DTensor& losses, double eb, const DTensor* nonzero_mask) {
    if (!(eb > 0.0)) throw ParamError("exact_sigma: eb must be positive");
    if (losses.empty()) throw DomainError("exact_sigma: empty loss tensor");
    if (nonzero_mask && !nonzero_mask->same_shape(losses))
        throw ShapeError("exact_sigma: mask shape does not match losses");

    double sum_sq = 0.0;
    for (std::size_t i = 0; i < losses.size(); ++i) {
        if (nonzero_mask && (*nonzero_mask)[i] == 0.0) continue;
        sum_sq += losses[i] * losses[i];
    }
    const double batch = static_cast<double>(losses.extent(0));
    return std::sqrt(eb * eb / 3.0 * sum_sq) / batch;
}

SigmaEstimate predict_sigma(double l_bar, double batch, double eb, double r, double a) {
    if (!(l_bar > 0.0) || !(batch > 0.0) || !(eb > 0.0) || !(a > 0.0))
        throw ParamError("predict_sigma: inputs must be positive");
    if (!(r > 0.0) || r > 1.0) throw ParamError("predict_sigma: R must be in (0, 1]");
    SigmaEstimate est;
    est.l_bar = l_bar;
    est.batch = batch;
    est.eb = eb;
    est.r = r;
    est.a = a;
    est.predicted_sigma = a * l_bar * std::sqrt(batch) * eb * std::sqrt(r);
    return est;
}

double fit_coefficient(const std::vector<SigmaObservation>& observations) {
    if (observations.empty()) throw ParamError("fit_coefficient: no observations");
    double num = 0.0, den = 0.0;
    for (const auto& o : observations) {
        const double x = o.l_bar * std::sqrt(o.batch) * o.eb * std::sqrt(o.r);
        num += x * o.sigma;
        den += x * x;
    }
    if (den == 0.0) throw ParamError("fit_coefficient: degenerate fit, all predictors are zero");
    return num / den;
}

ErrorDistributionReport distribution_report(const std::vector<double>& errors,
                                            double reference_sigma) {
    if (errors.empty()) throw DomainError("distribution_report: empty error sample");
    if (!(reference_sigma > 0.0))
        throw ParamError("distribution_report: reference sigma must be positive");

    ErrorDistributionReport rep;
    rep.sample_count = errors.size();

    double mean = 0.0;
    for (double e : errors) mean += e;
    mean /= static_cast<double>(errors.size());
    double var = 0.0;
    std::size_t within = 0;
    for (double e : errors) {
        var += (e - mean) * (e - mean);
        if (std::abs(e) <= reference_sigma) ++within;
    }
    rep.empirical_sigma = std::sqrt(var / static_cast<double>(errors.size()));
    rep.within_one_sigma = static_cast<double>(within) / static_cast<double>(errors.size());
    rep.degenerate = rep.empirical_sigma == 0.0;

    constexpr int kBins = 41;
    const double lo = -5.0 * reference_sigma;
    const double width = 10.0 * reference_sigma / kBins;
    rep.histogram_edges.resize(kBins + 1);
    for (int i = 0; i <= kBins; ++i) rep.histogram_edges[i] = lo + width * i;
    rep.histogram_counts.assign(kBins, 0);
    for (double e : errors) {
        int bin = static_cast<int>(std::floor((e - lo) / width));
        bin = std::clamp(bin, 0, kBins - 1); // out-of-range samples land in the edge bins
        ++rep.histogram_counts[static_cast<std::size_t>(bin)];
    }
    return rep;
}

std::string ErrorDistributionReport::to_json() const {
    nlohmann::ordered_json j;
    j["empirical_sigma"] = empirical_sigma;
    j["within_one_sigma"] = within_one_sigma;
    j["histogram_edges"] = histogram_edges;
    j["histogram_counts"] = histogram_counts;
    j["sample_count"] = sample_count;
    j["seed"] = seed;
    j["degenerate"] = degenerate;
    return j.dump(2);
}

std::string ErrorDistributionReport::histogram_csv() const {
    std::string out = "bin_lo,bin_hi,count\n";
    char line[96];
    for (std::size_t i = 0; i < histogram_counts.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%llu\n", histogram_edges[i],
                      histogram_edges[i + 1],
                      static_cast<unsigned long long>(histogram_counts[i]));
        out += line;
    }
    return out;
}

} // namespace acz
