#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "wellness/errors.hpp"

namespace wellness {

struct CorrelationMatrix {
    std::vector<std::string> activities;
    std::vector<std::vector<double>> eta; // A x A, symmetric
    std::vector<bool> zero_variance;      // per-activity flag

    double at(std::size_t i, std::size_t j) const { return eta[i][j]; }

    static CorrelationMatrix identity(const std::vector<std::string>& activities) {
        CorrelationMatrix m;
        m.activities = activities;
        m.eta.assign(activities.size(), std::vector<double>(activities.size(), 0.0));
        for (std::size_t i = 0; i < activities.size(); ++i) m.eta[i][i] = 1.0;
        m.zero_variance.assign(activities.size(), false);
        return m;
    }
};

// Pearson correlation between every pair of aligned per-activity probability
// streams. Pairs involving a zero-variance stream get entry 0 (flagged),
// including the diagonal.
inline CorrelationMatrix correlation_matrix(const std::vector<std::string>& activities,
                                            const std::vector<std::vector<double>>& streams) {
    if (streams.size() != activities.size())
        throw LengthMismatch("one stream required per activity");
    if (streams.empty()) throw LengthMismatch("no streams supplied");
    const std::size_t n = streams.front().size();
    for (const auto& s : streams)
        if (s.size() != n) throw LengthMismatch("streams differ in length");
    if (n < 2) throw TooShort("correlation needs at least 2 aligned samples");

    const std::size_t a = activities.size();
    std::vector<double> means(a, 0.0), sigmas(a, 0.0);
    for (std::size_t i = 0; i < a; ++i) {
        for (double v : streams[i]) means[i] += v;
        means[i] /= static_cast<double>(n);
        double var = 0.0;
        for (double v : streams[i]) var += (v - means[i]) * (v - means[i]);
        sigmas[i] = std::sqrt(var / static_cast<double>(n));
    }

    CorrelationMatrix m;
    m.activities = activities;
    m.eta.assign(a, std::vector<double>(a, 0.0));
    m.zero_variance.assign(a, false);
    for (std::size_t i = 0; i < a; ++i) m.zero_variance[i] = sigmas[i] == 0.0;
    for (std::size_t i = 0; i < a; ++i) {
        for (std::size_t j = i; j < a; ++j) {
            double value = 0.0;
            if (sigmas[i] > 0.0 && sigmas[j] > 0.0) {
                double cov = 0.0;
                for (std::size_t k = 0; k < n; ++k)
                    cov += (streams[i][k] - means[i]) * (streams[j][k] - means[j]);
                cov /= static_cast<double>(n);
                value = cov / (sigmas[i] * sigmas[j]);
                value = std::clamp(value, -1.0, 1.0);
            }
            m.eta[i][j] = value;
            m.eta[j][i] = value;
        }
    }
    return m;
}

enum class CorrectionMode {
    exclusive,  // activities form a distribution: clamp >= 0, renormalize
    multi_label // independent channels: clamp to [0,1]
};

// Correlation-feedback correction of one clip's prediction vector:
//   p_i <- p_i + gain * sum_{j != i} eta_ij * p_j
// In exclusive mode a corrected vector that clamps to all zeros falls back to
// the input unchanged.
inline std::vector<double> correct_predictions(const std::vector<double>& p,
                                               const CorrelationMatrix& eta,
                                               CorrectionMode mode = CorrectionMode::exclusive,
                                               double gain = 1.0) {
    const std::size_t a = p.size();
    if (eta.eta.size() != a) throw LengthMismatch("prediction/matrix size mismatch");
    std::vector<double> raw(a, 0.0);
    for (std::size_t i = 0; i < a; ++i) {
        double corr = 0.0;
        for (std::size_t j = 0; j < a; ++j) {
            if (j == i) continue;
            corr += eta.eta[i][j] * p[j];
        }
        raw[i] = p[i] + gain * corr;
    }
    if (mode == CorrectionMode::multi_label) {
        for (auto& v : raw) v = std::clamp(v, 0.0, 1.0);
        return raw;
    }
    double sum = 0.0;
    for (auto& v : raw) {
        v = std::max(v, 0.0);
        sum += v;
    }
    if (sum <= 0.0) return p;
    for (auto& v : raw) v /= sum;
    return raw;
}

} // namespace wellness
