#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "darkpoint/bench.hpp"
#include "darkpoint/io.hpp"

namespace fs = std::filesystem;
using namespace darkpoint;

namespace {

std::string g9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= text.size()) {
        const size_t comma = text.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(text.substr(start));
            break;
        }
        out.push_back(text.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

struct Options {
    int w = 64;
    int h = 48;
    double lambda = 4.0;
    double sigma = 2.0;
    int n = 1000;
    uint64_t seed = 0;
    std::string noise = "clean";
    double margin = 0.0;
    bool margin_set = false;
    std::string encoding = "unbiased";
    std::string norm = "peakone";
    std::string strategy = "dark";
    std::string strategies = "none,standard,dark";
    std::string encodings = "unbiased";
    double sigma_k = 0.0;
    bool sigma_k_set = false;
    bool modulate = false;
    std::string out_dir = ".";
    std::string preset;
    std::string out_file;
    double u = 0.0;
    double v = 0.0;
    std::vector<std::string> files;

    TrialConfig trial_config() const {
        TrialConfig cfg;
        cfg.w = w;
        cfg.h = h;
        cfg.lambda = DownsampleRatio(lambda);
        cfg.sigma = sigma;
        cfg.trials = n;
        cfg.seed = seed;
        cfg.noise = parse_noise(noise);
        if (margin_set) cfg.margin = margin;
        cfg.norm = parse_norm(norm);
        cfg.validate();
        return cfg;
    }

    // The modulation kernel width defaults to the encoder sigma when the run
    // knows it; decoding bare files falls back to 2.0.
    double effective_sigma_k(bool sigma_known) const {
        if (sigma_k_set) return sigma_k;
        return sigma_known ? sigma : 2.0;
    }
};

std::string heatmap_filename(int trial) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "heatmap_%04d.hmap", trial);
    return buf;
}

void run_gen(const Options& opt) {
    const TrialConfig cfg = opt.trial_config();
    const Encoding enc = parse_encoding(opt.encoding);
    const std::vector<ImageCoord> centers = generate_trials(cfg);

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);

    std::string csv = "trial_id,u,v\n";
    for (int i = 0; i < cfg.trials; ++i)
        csv += std::to_string(i) + "," + g9(centers[size_t(i)].u()) + "," +
               g9(centers[size_t(i)].v()) + "\n";
    const fs::path coords_path = fs::path(opt.out_dir) / "coords.csv";
    write_file_atomic(coords_path, csv);
    std::cout << "wrote " << coords_path.string() << " trials=" << cfg.trials << "\n";

    for (int i = 0; i < cfg.trials; ++i) {
        const Heatmap h = make_trial_heatmap(cfg, enc, centers[size_t(i)], i);
        const fs::path path = fs::path(opt.out_dir) / heatmap_filename(i);
        write_hmap(path, h);
        std::cout << "wrote " << path.string() << " trial=" << i << " center=("
                  << g9(centers[size_t(i)].u()) << "," << g9(centers[size_t(i)].v()) << ")\n";
    }
}

void run_encode(const Options& opt) {
    EncoderConfig enc{opt.sigma, parse_encoding(opt.encoding), parse_norm(opt.norm)};
    const Heatmap h =
        encode_keypoint(ImageCoord(opt.u, opt.v), DownsampleRatio(opt.lambda), opt.w, opt.h, enc);
    fs::path path = opt.out_file.empty() ? fs::path(opt.out_dir) / "keypoint.hmap"
                                         : fs::path(opt.out_file);
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    write_hmap(path, h);
    std::cout << "wrote " << path.string() << " center=(" << g9(opt.u) << "," << g9(opt.v)
              << ")\n";
}

void run_decode(const Options& opt) {
    const DecodeStrategy strategy =
        parse_strategy(opt.strategy, opt.effective_sigma_k(false), opt.modulate);
    std::cout << "file,strategy,u_img,v_img,confidence,fallback\n";
    for (const std::string& file : opt.files) {
        const HeatmapF h = read_hmap(file);
        const DecodeResult r = decode(h, strategy);
        // The row is assembled before printing, so a failure can never leave
        // a partial line behind.
        const std::string row = file + "," + opt.strategy + "," + g9(r.coord.u()) + "," +
                                g9(r.coord.v()) + "," + g9(r.confidence) + "," +
                                to_string(r.fallback) + "\n";
        std::cout << row;
    }
}

void run_bench_cmd(const Options& opt) {
    const TrialConfig cfg = opt.trial_config();
    const double sigma_k = opt.effective_sigma_k(true);

    std::vector<Encoding> encodings;
    std::vector<DecodeStrategy> strategies;
    if (!opt.preset.empty()) {
        if (opt.preset == "table1") {
            encodings = {std::nullopt};
            strategies = {NoShift{}, StandardShift{}, Dark{sigma_k, opt.modulate}};
        } else if (opt.preset == "table2") {
            encodings = {QuantMode::Round, std::nullopt};
            strategies = {StandardShift{}, Dark{sigma_k, opt.modulate}};
        } else {
            throw ConfigError("invalid config: unknown preset '" + opt.preset + "'");
        }
    } else {
        for (const std::string& name : split_csv(opt.encodings))
            encodings.push_back(parse_encoding(name));
        for (const std::string& name : split_csv(opt.strategies))
            strategies.push_back(parse_strategy(name, sigma_k, opt.modulate));
    }

    const BenchReport report = run_bench(cfg, encodings, strategies);

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    const fs::path json_path = fs::path(opt.out_dir) / "report.json";
    const fs::path csv_path = fs::path(opt.out_dir) / "report.csv";
    write_file_atomic(json_path, report_to_json(report));
    write_file_atomic(csv_path, report_to_csv(report));

    std::cout << report_to_table(report);
    std::cout << "wrote " << json_path.string() << "\n";
    std::cout << "wrote " << csv_path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"sub-pixel keypoint heatmap codec and synthetic benchmark"};
    app.require_subcommand(1);
    app.fallthrough();
    // --h is the heatmap height, so help stays long-form only
    app.set_help_flag("--help", "print usage");
    app.set_config("--config", "", "flat key=value config file (CLI flags win over it)");
    app.allow_config_extras(CLI::config_extras_mode::error);

    app.add_option("--seed", opt.seed, "RNG seed")->capture_default_str();
    app.add_option("--out-dir", opt.out_dir, "output directory")->capture_default_str();
    app.add_option("--w", opt.w, "heatmap width")->check(CLI::Range(3, 1 << 20))
        ->capture_default_str();
    app.add_option("--h", opt.h, "heatmap height")->check(CLI::Range(3, 1 << 20))
        ->capture_default_str();
    app.add_option("--lambda", opt.lambda, "downsampling ratio")->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--sigma", opt.sigma, "encoder Gaussian sigma, heatmap px")
        ->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--n", opt.n, "number of trials")->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--noise", opt.noise,
                   "noise model: clean | gaussian:AMP | distractor:COUNT,FRAC | "
                   "sigma-mismatch:SIGMA")->capture_default_str();
    auto* margin_opt =
        app.add_option("--margin", opt.margin, "interior margin, heatmap px (default 3 sigma)")
            ->check(CLI::PositiveNumber);
    app.add_option("--encoding", opt.encoding,
                   "unbiased | biased-floor | biased-ceil | biased-round")
        ->capture_default_str();
    app.add_option("--norm", opt.norm, "peakone | density")->capture_default_str();
    auto* sigma_k_opt = app.add_option("--sigma-k", opt.sigma_k,
                                       "modulation kernel sigma (default: encoder sigma)")
                            ->check(CLI::PositiveNumber);
    app.add_flag("--modulate,!--no-modulate", opt.modulate,
                 "smooth the heatmap before Taylor refinement (dark strategy)");

    CLI::App* gen = app.add_subcommand("gen", "write ground-truth coords and HMAP files");
    gen->fallthrough();

    CLI::App* encode = app.add_subcommand("encode", "encode one keypoint into an HMAP file");
    encode->fallthrough();
    encode->add_option("--u", opt.u, "image-space u (horizontal px)")->required();
    encode->add_option("--v", opt.v, "image-space v (vertical px)")->required();
    encode->add_option("--out", opt.out_file, "output path (default <out-dir>/keypoint.hmap)");

    CLI::App* decode_cmd = app.add_subcommand("decode", "decode HMAP files to coordinates (CSV)");
    decode_cmd->fallthrough();
    decode_cmd->add_option("files", opt.files, "HMAP files")->required()->expected(-1);
    decode_cmd->add_option("--strategy", opt.strategy, "none | standard | dark")
        ->capture_default_str();

    CLI::App* bench = app.add_subcommand("bench", "run the synthetic benchmark grid");
    bench->fallthrough();
    bench->add_option("--preset", opt.preset, "table1 | table2");
    bench->add_option("--strategies", opt.strategies, "comma-separated strategy list")
        ->capture_default_str();
    bench->add_option("--encodings", opt.encodings, "comma-separated encoding list")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
        opt.margin_set = margin_opt->count() > 0;
        opt.sigma_k_set = sigma_k_opt->count() > 0;
        if (gen->parsed()) run_gen(opt);
        if (encode->parsed()) run_encode(opt);
        if (decode_cmd->parsed()) run_decode(opt);
        if (bench->parsed()) run_bench_cmd(opt);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
