#include "darkpoint/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <set>
#include <thread>

#include "darkpoint/rng.hpp"

namespace darkpoint {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

double parse_double(const std::string& s, const char* what) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(std::string("invalid config: cannot parse ") + what + " '" + s + "'");
    }
}

// Each trial owns two decorrelated substreams so that runs are reproducible
// regardless of execution order: one for the centre draw, one for the noise
// realization. The noise stream restarts per encoding, so all encodings of a
// trial see the same noise field.
uint64_t coord_stream(uint64_t seed, int trial) { return substream_seed(seed, 2 * uint64_t(trial)); }
uint64_t noise_stream(uint64_t seed, int trial) {
    return substream_seed(seed, 2 * uint64_t(trial) + 1);
}

int resolve_threads() {
    if (const char* env = std::getenv("DARKPOINT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return int(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? int(hc) : 1;
}

template <typename F>
void for_each_trial(int n, F&& body) {
    const int threads = std::min(resolve_threads(), n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (int i = t; i < n; i += threads) body(i);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

// Linear-interpolation quantile of an ascending-sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return 0.0;
    const double pos = p * double(sorted.size() - 1);
    const size_t lo = size_t(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - double(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

void add_gaussian_bump(Heatmap& h, double cx, double cy, double sigma, double amp) {
    const double half_inv_s2 = 0.5 / (sigma * sigma);
    for (Index y = 0; y < h.height(); ++y)
        for (Index x = 0; x < h.width(); ++x) {
            const double dx = double(x) - cx;
            const double dy = double(y) - cy;
            h.at(x, y) += amp * std::exp(-(dx * dx + dy * dy) * half_inv_s2);
        }
}

double render_sigma_for(const TrialConfig& cfg) {
    if (const auto* mismatch = std::get_if<SigmaMismatch>(&cfg.noise))
        return mismatch->render_sigma;
    return cfg.sigma;
}

void apply_noise(Heatmap& h, const TrialConfig& cfg, const Vec2& true_center, SplitMix64& rng) {
    if (std::holds_alternative<Clean>(cfg.noise) || std::holds_alternative<SigmaMismatch>(cfg.noise))
        return;

    if (const auto* gauss = std::get_if<AdditiveGaussian>(&cfg.noise)) {
        double* data = h.grid().data();
        for (Index i = 0; i < h.size(); ++i) data[i] += gauss->amplitude * rng.normal();
        return;
    }

    const auto& distractor = std::get<Distractor>(cfg.noise);
    const double sigma = render_sigma_for(cfg);
    const double peak = cfg.norm == NormMode::Density
                            ? 1.0 / (2.0 * std::numbers::pi * sigma * sigma)
                            : 1.0;
    const double min_dist = 4.0 * sigma;
    // Bumps keep 4 sigma from the true centre and from each other; stacked
    // bumps could otherwise outgrow the true peak.
    std::vector<Vec2> placed_at{true_center};
    for (int k = 0; k < distractor.count; ++k) {
        Vec2 c(0.0, 0.0);
        bool placed = false;
        for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
            c = Vec2(rng.uniform(0.0, double(h.width() - 1)),
                     rng.uniform(0.0, double(h.height() - 1)));
            placed = true;
            for (const Vec2& other : placed_at) placed &= (c - other).norm() >= min_dist;
        }
        if (!placed)
            throw ConfigError("invalid config: grid too small to place distractors 4 sigma away");
        placed_at.push_back(c);
        add_gaussian_bump(h, c.x(), c.y(), sigma, distractor.peak_fraction * peak);
    }
}

}  // namespace

std::string to_string(const NoiseModel& noise) {
    return std::visit(detail::overloaded{
                          [](const Clean&) { return std::string("clean"); },
                          [](const AdditiveGaussian& n) { return "gaussian:" + format_double(n.amplitude); },
                          [](const Distractor& n) {
                              return "distractor:" + std::to_string(n.count) + "," +
                                     format_double(n.peak_fraction);
                          },
                          [](const SigmaMismatch& n) {
                              return "sigma-mismatch:" + format_double(n.render_sigma);
                          },
                      },
                      noise);
}

NoiseModel parse_noise(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (head == "clean" && args.empty()) return Clean{};
    if (head == "gaussian") return AdditiveGaussian{parse_double(args, "noise amplitude")};
    if (head == "sigma-mismatch") return SigmaMismatch{parse_double(args, "render sigma")};
    if (head == "distractor") {
        const auto comma = args.find(',');
        if (comma == std::string::npos)
            throw ConfigError("invalid config: distractor noise needs 'count,fraction'");
        const double count = parse_double(args.substr(0, comma), "distractor count");
        const double fraction = parse_double(args.substr(comma + 1), "distractor fraction");
        return Distractor{int(count), fraction};
    }
    throw ConfigError("invalid config: unknown noise model '" + text + "'");
}

double TrialConfig::effective_margin() const {
    if (margin) return *margin;
    const double feasible = 0.5 * double(std::min(w, h) - 1);
    return std::max(2.0, std::min(3.0 * sigma, feasible));
}

void TrialConfig::validate() const {
    if (w < 3 || h < 3)
        throw ConfigError("invalid config: heatmap grid must be at least 3x3");
    if (trials < 1) throw ConfigError("invalid config: trial count must be >= 1");
    if (!std::isfinite(sigma) || sigma <= 0.0)
        throw ConfigError("invalid config: sigma must be finite and > 0");
    const double m = effective_margin();
    if (!std::isfinite(m) || m < 2.0)
        throw ConfigError("invalid config: margin must be >= 2");
    if (double(w) - 2.0 * m < 1.0 || double(h) - 2.0 * m < 1.0)
        throw ConfigError("invalid config: margin " + format_double(m) +
                          " leaves no interior in a " + std::to_string(w) + "x" +
                          std::to_string(h) + " grid");
    std::visit(detail::overloaded{
                   [](const Clean&) {},
                   [](const AdditiveGaussian& n) {
                       if (!std::isfinite(n.amplitude) || n.amplitude < 0.0)
                           throw ConfigError("invalid config: noise amplitude must be >= 0");
                   },
                   [](const Distractor& n) {
                       if (n.count < 0)
                           throw ConfigError("invalid config: distractor count must be >= 0");
                       if (!(n.peak_fraction > 0.0) || !(n.peak_fraction < 1.0))
                           throw ConfigError(
                               "invalid config: distractor fraction must be in (0, 1)");
                   },
                   [](const SigmaMismatch& n) {
                       if (!std::isfinite(n.render_sigma) || n.render_sigma <= 0.0)
                           throw ConfigError("invalid config: render sigma must be > 0");
                   },
               },
               noise);
}

std::string encoding_name(const Encoding& e) {
    if (!e) return "unbiased";
    return std::string("biased-") + to_string(*e);
}

Encoding parse_encoding(const std::string& text) {
    if (text == "unbiased") return std::nullopt;
    if (text == "biased-floor") return QuantMode::Floor;
    if (text == "biased-ceil") return QuantMode::Ceil;
    if (text == "biased-round") return QuantMode::Round;
    throw ConfigError("invalid config: unknown encoding '" + text + "'");
}

std::string strategy_name(const DecodeStrategy& s) {
    return std::visit(detail::overloaded{
                          [](const NoShift&) { return "none"; },
                          [](const StandardShift&) { return "standard"; },
                          [](const Dark&) { return "dark"; },
                      },
                      s);
}

DecodeStrategy parse_strategy(const std::string& text, double sigma_k, bool modulate) {
    if (text == "none") return NoShift{};
    if (text == "standard") return StandardShift{};
    if (text == "dark") return Dark{sigma_k, modulate};
    throw ConfigError("invalid config: unknown strategy '" + text + "'");
}

std::vector<ImageCoord> generate_trials(const TrialConfig& cfg) {
    cfg.validate();
    const double m = cfg.effective_margin();
    const double hi_u = double(cfg.w - 1) - m;
    const double hi_v = double(cfg.h - 1) - m;
    std::vector<ImageCoord> centers;
    centers.reserve(size_t(cfg.trials));
    for (int i = 0; i < cfg.trials; ++i) {
        SplitMix64 rng(coord_stream(cfg.seed, i));
        const double u = rng.uniform(m, hi_u);
        const double v = rng.uniform(m, hi_v);
        centers.push_back(upscale(HeatmapCoord(u, v), cfg.lambda));
    }
    return centers;
}

Heatmap make_trial_heatmap(const TrialConfig& cfg, const Encoding& encoding,
                           const ImageCoord& center, int trial_index) {
    const EncoderConfig enc{render_sigma_for(cfg), encoding, cfg.norm};
    Heatmap h = encode_keypoint(center, cfg.lambda, cfg.w, cfg.h, enc);
    SplitMix64 rng(noise_stream(cfg.seed, trial_index));
    apply_noise(h, cfg, downscale(center, cfg.lambda).vec(), rng);
    return h;
}

BenchReport run_bench(const TrialConfig& cfg, const std::vector<Encoding>& encodings,
                      const std::vector<DecodeStrategy>& strategies) {
    cfg.validate();
    if (encodings.empty() || strategies.empty())
        throw ConfigError("invalid config: need at least one encoding and one strategy");

    BenchReport report;
    report.config = cfg;
    for (const auto& e : encodings) report.encodings.push_back(encoding_name(e));
    for (const auto& s : strategies) {
        report.strategies.push_back(strategy_name(s));
        if (const auto* dark = std::get_if<Dark>(&s)) {
            report.sigma_k = dark->sigma_k;
            report.modulate = dark->modulate;
        }
    }
    if (std::set<std::string>(report.encodings.begin(), report.encodings.end()).size() !=
            report.encodings.size() ||
        std::set<std::string>(report.strategies.begin(), report.strategies.end()).size() !=
            report.strategies.size())
        throw ConfigError("invalid config: duplicate encoding or strategy");

    const std::vector<ImageCoord> centers = generate_trials(cfg);
    const size_t n_enc = encodings.size();
    const size_t n_str = strategies.size();
    const size_t n_cells = n_enc * n_str;

    struct TrialOutcome {
        double err_img = 0.0;
        double err_hm = 0.0;
        Fallback fallback = Fallback::None;
        int64_t ns = 0;
    };
    std::vector<TrialOutcome> outcomes(size_t(cfg.trials) * n_cells);

    for_each_trial(cfg.trials, [&](int i) {
        const Vec2 g_img = centers[size_t(i)].vec();
        const Vec2 g_hm = downscale(centers[size_t(i)], cfg.lambda).vec();
        for (size_t e = 0; e < n_enc; ++e) {
            const Heatmap h = make_trial_heatmap(cfg, encodings[e], centers[size_t(i)], i);
            for (size_t s = 0; s < n_str; ++s) {
                const auto t0 = std::chrono::steady_clock::now();
                const DecodeResult r = decode(h, strategies[s]);
                const auto t1 = std::chrono::steady_clock::now();
                TrialOutcome& out = outcomes[size_t(i) * n_cells + e * n_str + s];
                out.err_img = (r.coord.vec() - g_img).norm();
                out.err_hm = (r.heatmap_coord.vec() - g_hm).norm();
                out.fallback = r.fallback;
                out.ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
            }
        }
    });

    // Order-independent reduction: per-trial outcomes are folded in trial
    // order, so serial and parallel executions produce the same report.
    const double n = double(cfg.trials);
    for (size_t e = 0; e < n_enc; ++e)
        for (size_t s = 0; s < n_str; ++s) {
            std::vector<double> errs_img, errs_hm;
            errs_img.reserve(size_t(cfg.trials));
            errs_hm.reserve(size_t(cfg.trials));
            CellStats cell;
            int64_t total_ns = 0;
            int recovered[3] = {0, 0, 0};
            int border = 0, singular = 0, offset = 0;
            for (int i = 0; i < cfg.trials; ++i) {
                const TrialOutcome& out = outcomes[size_t(i) * n_cells + e * n_str + s];
                errs_img.push_back(out.err_img);
                errs_hm.push_back(out.err_hm);
                total_ns += out.ns;
                for (int t = 0; t < 3; ++t)
                    if (out.err_img < kRecoveryThresholds[t]) ++recovered[t];
                border += out.fallback == Fallback::BorderMax;
                singular += out.fallback == Fallback::SingularHessian;
                offset += out.fallback == Fallback::NonMaximizingOffset;
            }
            double sum_img = 0.0, sum_hm = 0.0;
            for (double v : errs_img) sum_img += v;
            for (double v : errs_hm) sum_hm += v;
            cell.mean_err = sum_img / n;
            cell.mean_err_heatmap = sum_hm / n;
            std::sort(errs_img.begin(), errs_img.end());
            cell.median_err = quantile_sorted(errs_img, 0.5);
            cell.p95_err = quantile_sorted(errs_img, 0.95);
            for (int t = 0; t < 3; ++t) cell.recovery_rate[t] = recovered[t] / n;
            cell.fallback_border = border / n;
            cell.fallback_singular = singular / n;
            cell.fallback_offset = offset / n;
            cell.ns_per_decode = double(total_ns) / n;
            report.cells[report.encodings[e] + "/" + report.strategies[s]] = cell;
        }

    return report;
}

}  // namespace darkpoint
