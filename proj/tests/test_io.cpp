#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "darkpoint/io.hpp"
#include "darkpoint/rng.hpp"

using namespace darkpoint;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "darkpoint_io_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

HeatmapF random_heatmap(SplitMix64& rng) {
    const Index w = 3 + Index(rng.next() % 30);
    const Index h = 3 + Index(rng.next() % 30);
    HeatmapF::Grid grid(h, w);
    for (Index i = 0; i < grid.size(); ++i)
        grid.data()[i] = float(rng.uniform(-10.0, 10.0));
    return HeatmapF(std::move(grid), DownsampleRatio(rng.uniform(0.5, 16.0)));
}

}  // namespace

TEST_CASE("hmap files have the documented fixed-size header") {
    const fs::path path = temp_dir() / "header.hmap";
    write_hmap(path, HeatmapF::constant(16, 12, 0.5f, DownsampleRatio(4.0)));
    CHECK(fs::file_size(path) == kHmapHeaderBytes + 16 * 12 * 4);
    CHECK(kHmapHeaderBytes == 22);

    const std::string bytes = slurp(path);
    CHECK(bytes.substr(0, 4) == "HMAP");
    CHECK(uint8_t(bytes[4]) == 1);  // version, little-endian u16
    CHECK(uint8_t(bytes[5]) == 0);
    CHECK(uint8_t(bytes[6]) == 16);  // width u32
    CHECK(uint8_t(bytes[10]) == 12);  // height u32
}

TEST_CASE("property: heatmaps round-trip through HMAP bit-exactly") {
    SplitMix64 rng(77);
    const fs::path path = temp_dir() / "roundtrip.hmap";
    for (int i = 0; i < 100; ++i) {
        const HeatmapF original = random_heatmap(rng);
        write_hmap(path, original);
        const HeatmapF loaded = read_hmap(path);
        REQUIRE(loaded.width() == original.width());
        REQUIRE(loaded.height() == original.height());
        CHECK(loaded.lambda().value() == original.lambda().value());
        CHECK(std::memcmp(loaded.grid().data(), original.grid().data(),
                          size_t(original.size()) * sizeof(float)) == 0);

        // A second write of the loaded value reproduces the file bytes.
        const fs::path again = temp_dir() / "roundtrip2.hmap";
        write_hmap(again, loaded);
        CHECK(slurp(again) == slurp(path));
    }
}

TEST_CASE("double-precision heatmaps narrow to float32 on write") {
    const fs::path path = temp_dir() / "narrow.hmap";
    const Heatmap h = Heatmap::constant(5, 5, 0.1, DownsampleRatio(2.0));
    write_hmap(path, h);
    const HeatmapF loaded = read_hmap(path);
    CHECK(loaded.at(2, 2) == 0.1f);
}

TEST_CASE("read_hmap rejects malformed files with format errors") {
    const fs::path good = temp_dir() / "good.hmap";
    write_hmap(good, HeatmapF::constant(8, 6, 1.0f, DownsampleRatio(1.0)));
    const std::string bytes = slurp(good);

    SUBCASE("bad magic") {
        fs::path path = temp_dir() / "magic.hmap";
        std::string corrupt = bytes;
        corrupt[0] = 'X';
        write_file_atomic(path, corrupt);
        try {
            read_hmap(path);
            CHECK(false);
        } catch (const FormatError& e) {
            // the message names the offending file
            CHECK(std::string(e.what()).find("magic.hmap") != std::string::npos);
        }
    }
    SUBCASE("unsupported version") {
        fs::path path = temp_dir() / "version.hmap";
        std::string corrupt = bytes;
        corrupt[4] = 9;
        write_file_atomic(path, corrupt);
        CHECK_THROWS_AS(read_hmap(path), FormatError);
    }
    SUBCASE("truncated header") {
        fs::path path = temp_dir() / "short.hmap";
        write_file_atomic(path, bytes.substr(0, 10));
        CHECK_THROWS_AS(read_hmap(path), FormatError);
    }
    SUBCASE("truncated payload") {
        fs::path path = temp_dir() / "payload.hmap";
        write_file_atomic(path, bytes.substr(0, bytes.size() - 7));
        CHECK_THROWS_AS(read_hmap(path), FormatError);
    }
    SUBCASE("trailing bytes") {
        fs::path path = temp_dir() / "trailing.hmap";
        write_file_atomic(path, bytes + "junk");
        CHECK_THROWS_AS(read_hmap(path), FormatError);
    }
    SUBCASE("undersized dimensions") {
        fs::path path = temp_dir() / "tiny.hmap";
        std::string corrupt = bytes;
        corrupt[6] = 2;  // width = 2
        write_file_atomic(path, corrupt);
        CHECK_THROWS_AS(read_hmap(path), FormatError);
    }
    SUBCASE("missing file is an I/O error, not a format error") {
        CHECK_THROWS_AS(read_hmap(temp_dir() / "nope.hmap"), IoError);
    }
}

TEST_CASE("write failures surface as I/O errors naming the path") {
    const fs::path path = temp_dir() / "no_such_dir" / "x.hmap";
    CHECK_THROWS_AS(write_hmap(path, HeatmapF::constant(4, 4, 0.0f, DownsampleRatio(1.0))),
                    IoError);
}

TEST_CASE("json report excludes timing and serializes deterministically") {
    TrialConfig cfg;
    cfg.w = 24;
    cfg.h = 18;
    cfg.trials = 40;
    cfg.seed = 3;
    const BenchReport report = run_bench(cfg, {std::nullopt}, {NoShift{}, Dark{2.0, false}});
    const std::string json = report_to_json(report);
    CHECK(json.find("ns_per_decode") == std::string::npos);
    CHECK(json.find("\"unbiased/dark\"") != std::string::npos);
    CHECK(json.find("\"rate_0.5\"") != std::string::npos);
    CHECK(json == report_to_json(run_bench(cfg, {std::nullopt}, {NoShift{}, Dark{2.0, false}})));

    const std::string csv = report_to_csv(report);
    CHECK(csv.rfind("encoding,strategy,mean_err,median_err,p95_err,rate_0.1,rate_0.5,rate_1.0,"
                    "fallback_border,fallback_singular,fallback_offset,ns_per_decode\n", 0) == 0);
    CHECK(csv.find("unbiased,none,") != std::string::npos);
    CHECK(csv.find("unbiased,dark,") != std::string::npos);
}
