#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "darkpoint/coords.hpp"
#include "darkpoint/decoder.hpp"
#include "darkpoint/encoder.hpp"
#include "darkpoint/heatmap.hpp"
#include "darkpoint/oracle.hpp"

namespace darkpoint {

struct Clean {};

/// i.i.d. N(0, amplitude^2) added to every activation.
struct AdditiveGaussian {
    double amplitude = 1e-3;
};

/// Spurious Gaussian bumps of peak_fraction times the true peak, placed at
/// least 4 sigma away from the true centre so the global argmax stays put.
struct Distractor {
    int count = 1;
    double peak_fraction = 0.5;
};

/// Heatmap rendered with render_sigma while decoders and the oracle keep
/// assuming the configured sigma.
struct SigmaMismatch {
    double render_sigma = 3.0;
};

using NoiseModel = std::variant<Clean, AdditiveGaussian, Distractor, SigmaMismatch>;

std::string to_string(const NoiseModel& noise);
NoiseModel parse_noise(const std::string& text);

/// One synthetic experiment: N ground-truth keypoints drawn uniformly over
/// the interior of the heatmap, encoded, corrupted, decoded, scored.
struct TrialConfig {
    Index w = 64;
    Index h = 48;
    DownsampleRatio lambda{4.0};
    double sigma = 2.0;
    int trials = 1000;
    uint64_t seed = 0;
    NoiseModel noise = Clean{};
    std::optional<double> margin;  ///< nullopt: 3 sigma, clamped into the grid
    NormMode norm = NormMode::PeakOne;

    double effective_margin() const;
    void validate() const;
};

/// PCK-style exact-recovery thresholds, image px.
inline constexpr double kRecoveryThresholds[3] = {0.1, 0.5, 1.0};

struct CellStats {
    double mean_err = 0.0;    ///< image px
    double median_err = 0.0;
    double p95_err = 0.0;
    double mean_err_heatmap = 0.0;
    double recovery_rate[3] = {0.0, 0.0, 0.0};  ///< at kRecoveryThresholds
    double fallback_border = 0.0;
    double fallback_singular = 0.0;
    double fallback_offset = 0.0;
    double ns_per_decode = 0.0;  ///< wall clock; excluded from the JSON report
};

/// Bias mode of an encoding cell; nullopt renders at the exact sub-pixel
/// centre (unbiased), a QuantMode renders at the snapped centre (biased).
using Encoding = std::optional<QuantMode>;

std::string encoding_name(const Encoding& e);
std::string strategy_name(const DecodeStrategy& s);
Encoding parse_encoding(const std::string& text);
DecodeStrategy parse_strategy(const std::string& text, double sigma_k, bool modulate);

struct BenchReport {
    TrialConfig config;
    double sigma_k = 0.0;
    bool modulate = false;
    std::vector<std::string> encodings;   ///< row order
    std::vector<std::string> strategies;  ///< column order
    std::map<std::string, CellStats> cells;  ///< keyed "encoding/strategy"
};

/// N image-space keypoints whose downscaled positions are uniform over
/// [margin, w-1-margin] x [margin, h-1-margin]. Deterministic given the seed.
std::vector<ImageCoord> generate_trials(const TrialConfig& cfg);

/// Renders the heatmap a trial sees: encode the centre (with the trial
/// config's sigma unless the noise model overrides it) and apply the noise
/// realization for that trial index. Cells sharing an encoding see
/// bit-identical inputs.
Heatmap make_trial_heatmap(const TrialConfig& cfg, const Encoding& encoding,
                           const ImageCoord& center, int trial_index);

/// Full encoding x strategy cross-product on one shared trial sequence.
/// Deterministic given the seed; trials may run in parallel (capped by the
/// DARKPOINT_THREADS environment variable) without changing the report.
BenchReport run_bench(const TrialConfig& cfg, const std::vector<Encoding>& encodings,
                      const std::vector<DecodeStrategy>& strategies);

}  // namespace darkpoint
