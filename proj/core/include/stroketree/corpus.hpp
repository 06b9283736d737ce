#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stroketree/audio_io.hpp"
#include "stroketree/dataset.hpp"
#include "stroketree/features.hpp"

namespace stroketree {

/// The built-in 13-class stroke bank. Partial structures mimic resonant
/// drum strokes; `ti` and `ta` differ by less than the per-clip jitter on
/// every parameter, so they overlap the way the hard pair does in practice.
const std::vector<StrokeSpec>& default_stroke_presets();

/// Labels of the deliberately overlapping pair in the default bank.
std::pair<std::string, std::string> overlapping_pair();

/// Parses a stroke bank file: one stroke per line, space-separated
/// `key=value` fields (label, partial_freqs_hz, partial_amps, decay_s,
/// noise_level, duration_s); lists are comma-separated; `#` starts a comment.
std::vector<StrokeSpec> parse_stroke_spec_file(const std::filesystem::path& path);

/// Renders the bank back into the file format accepted above.
std::string stroke_spec_file_text(const std::vector<StrokeSpec>& specs);

/// Writes `clips_per_class` labeled WAVs per stroke into out_dir/<label>/.
/// Each clip gets a seeded per-clip jitter of partial frequencies, amplitudes
/// and decay, so classes have within-class spread; deterministic for a fixed
/// seed. When `written` is given, every created path is appended to it (files
/// and directories), so a caller can undo a partial run.
void generate_corpus(const std::vector<StrokeSpec>& specs, int clips_per_class, int rate_hz,
                     std::uint64_t seed, const std::filesystem::path& out_dir,
                     std::vector<std::filesystem::path>* written = nullptr);

/// Loads every WAV under dir/<label>/, applies the fixed-duration clip and
/// peak normalization, extracts features, and assembles a Dataset. Labels
/// come from the subdirectory names; directories and files are visited in
/// sorted order.
Dataset extract_directory(const std::filesystem::path& dir, const AnalysisConfig& cfg,
                          int expected_rate_hz, double duration_s);

} // namespace stroketree
