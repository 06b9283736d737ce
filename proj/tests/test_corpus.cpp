#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "stroketree/corpus.hpp"
#include "stroketree/error.hpp"
#include "test_support.hpp"

using namespace stroketree;
using test_support::TempDir;
using test_support::contains;

namespace fs = std::filesystem;

TEST_CASE("default presets: 13 classes with one overlapping pair") {
    const auto& presets = default_stroke_presets();
    REQUIRE(presets.size() == 13);

    const auto [a, b] = overlapping_pair();
    const StrokeSpec* pa = nullptr;
    const StrokeSpec* pb = nullptr;
    std::set<std::string> labels;
    for (const auto& s : presets) {
        labels.insert(s.label);
        if (s.label == a) pa = &s;
        if (s.label == b) pb = &s;
    }
    CHECK(labels.size() == 13); // distinct labels
    REQUIRE(pa != nullptr);
    REQUIRE(pb != nullptr);
    // The pair's parameters sit within ~3 % of each other, far closer than
    // any other class pair, so jittered renders overlap.
    REQUIRE(pa->partial_freqs_hz.size() == pb->partial_freqs_hz.size());
    for (std::size_t i = 0; i < pa->partial_freqs_hz.size(); ++i)
        CHECK(std::fabs(pa->partial_freqs_hz[i] / pb->partial_freqs_hz[i] - 1.0) < 0.03);
    CHECK(std::fabs(pa->decay_s / pb->decay_s - 1.0) < 0.15);
    CHECK(pa->decay_s != pb->decay_s);
}

TEST_CASE("stroke spec file round-trip") {
    TempDir tmp("spec");
    const auto& presets = default_stroke_presets();
    std::ofstream(tmp / "bank.txt") << stroke_spec_file_text(presets);

    const auto parsed = parse_stroke_spec_file(tmp / "bank.txt");
    REQUIRE(parsed.size() == presets.size());
    for (std::size_t i = 0; i < presets.size(); ++i) {
        CHECK(parsed[i].label == presets[i].label);
        CHECK(parsed[i].partial_freqs_hz == presets[i].partial_freqs_hz);
        CHECK(parsed[i].partial_amps == presets[i].partial_amps);
        CHECK(parsed[i].decay_s == presets[i].decay_s);
        CHECK(parsed[i].noise_level == presets[i].noise_level);
        CHECK(parsed[i].duration_s == presets[i].duration_s);
    }
}

TEST_CASE("stroke spec file errors name the line") {
    TempDir tmp("spec");

    SUBCASE("unknown key") {
        std::ofstream(tmp / "bad.txt") << "label=x partial_freqs_hz=100 partial_amps=1 "
                                          "decay_s=0.1 noise_level=0 duration_s=0.5 what=1\n";
        try {
            parse_stroke_spec_file(tmp / "bad.txt");
            FAIL("expected Error");
        } catch (const Error& e) {
            CHECK(contains(e.what(), "line 1"));
            CHECK(contains(e.what(), "what"));
        }
    }
    SUBCASE("length mismatch") {
        std::ofstream(tmp / "bad.txt") << "# comment\nlabel=x partial_freqs_hz=100,200 "
                                          "partial_amps=1 decay_s=0.1 noise_level=0 duration_s=0.5\n";
        try {
            parse_stroke_spec_file(tmp / "bad.txt");
            FAIL("expected Error");
        } catch (const Error& e) {
            CHECK(contains(e.what(), "line 2"));
        }
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(parse_stroke_spec_file(tmp / "absent.txt"), Error);
    }
}

TEST_CASE("generate_corpus writes a deterministic labeled corpus") {
    TempDir tmp("corpus");
    // Two small classes keep the test fast.
    std::vector<StrokeSpec> specs(default_stroke_presets().begin(),
                                  default_stroke_presets().begin() + 2);
    specs[0].duration_s = 0.1;
    specs[1].duration_s = 0.1;

    generate_corpus(specs, 3, 22050, 17, tmp / "a");
    generate_corpus(specs, 3, 22050, 17, tmp / "b");

    int files = 0;
    for (const auto& s : specs) {
        for (int i = 0; i < 3; ++i) {
            char name[64];
            std::snprintf(name, sizeof(name), "%s_%03d.wav", s.label.c_str(), i);
            const fs::path pa = tmp / "a" / s.label / name;
            const fs::path pb = tmp / "b" / s.label / name;
            REQUIRE(fs::exists(pa));
            REQUIRE(fs::exists(pb));
            // Byte-identical across runs with the same seed.
            std::ifstream fa(pa, std::ios::binary), fb(pb, std::ios::binary);
            std::string ba((std::istreambuf_iterator<char>(fa)), {});
            std::string bb((std::istreambuf_iterator<char>(fb)), {});
            REQUIRE(ba == bb);
            ++files;
        }
    }
    CHECK(files == 6);

    // Clips within one class differ (per-clip jitter and noise).
    std::ifstream f0(tmp / "a" / specs[0].label / (specs[0].label + "_000.wav"),
                     std::ios::binary);
    std::ifstream f1(tmp / "a" / specs[0].label / (specs[0].label + "_001.wav"),
                     std::ios::binary);
    std::string b0((std::istreambuf_iterator<char>(f0)), {});
    std::string b1((std::istreambuf_iterator<char>(f1)), {});
    CHECK(b0 != b1);
}

TEST_CASE("extract_directory builds a labeled dataset in sorted order") {
    TempDir tmp("extract");
    std::vector<StrokeSpec> specs(default_stroke_presets().begin(),
                                  default_stroke_presets().begin() + 3);
    for (auto& s : specs) s.duration_s = 0.1;
    generate_corpus(specs, 2, 22050, 4, tmp / "corpus");

    AnalysisConfig cfg;
    Dataset ds = extract_directory(tmp / "corpus", cfg, 22050, 0.1);
    CHECK(ds.rows.size() == 6);
    CHECK(ds.feature_names.size() == 58);
    // Labels in sorted directory order.
    std::vector<std::string> sorted_labels = {specs[0].label, specs[1].label, specs[2].label};
    std::sort(sorted_labels.begin(), sorted_labels.end());
    CHECK(ds.class_names == sorted_labels);

    SUBCASE("rate mismatch propagates with the file name") {
        try {
            extract_directory(tmp / "corpus", cfg, 44100, 0.1);
            FAIL("expected Error");
        } catch (const Error& e) {
            CHECK(contains(e.what(), "sample rate mismatch"));
            CHECK(contains(e.what(), ".wav"));
        }
    }
    SUBCASE("empty directory is an error") {
        fs::create_directories(tmp / "empty");
        CHECK_THROWS_AS(extract_directory(tmp / "empty", cfg, 22050, 0.1), Error);
    }
}
