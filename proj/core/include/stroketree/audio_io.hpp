#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace stroketree {

/// Mono audio, amplitudes in [-1, 1].
struct AudioClip {
    std::vector<double> samples;
    int sample_rate_hz = 0;
    std::string label;     // stroke name; empty when unlabeled
    std::string source_id; // file path or synthesis tag
};

/// Recipe for one synthetic stroke class: a bank of exponentially decaying
/// partials plus broadband noise.
struct StrokeSpec {
    std::string label;
    std::vector<double> partial_freqs_hz;
    std::vector<double> partial_amps;
    double decay_s = 0.3;     // amplitude e-folding time
    double noise_level = 0.0; // in [0, 1]
    double duration_s = 0.5;  // in (0, 1]
};

/// Reads a RIFF/WAVE file. Only PCM 16-bit, 1 or 2 channels is accepted;
/// stereo is downmixed by per-sample channel average and integer samples are
/// scaled to [-1, 1] by dividing by 32768. The container rate must equal
/// expected_rate_hz (no resampling).
AudioClip load_wav(const std::filesystem::path& path, int expected_rate_hz);

/// Writes a clip as mono PCM 16-bit WAV. Samples are quantized by
/// round(x * 32767).
void write_wav(const std::filesystem::path& path, const AudioClip& clip);

/// Returns a clip of exactly round(duration_s * rate) samples: truncates a
/// longer clip, zero-pads a shorter one.
AudioClip clip_to_duration(const AudioClip& clip, double duration_s);

/// Scales so the peak absolute amplitude is 1.0. An all-zero clip is
/// returned unchanged.
AudioClip peak_normalize(const AudioClip& clip);

/// Renders spec as a sum of decaying sinusoids plus seeded uniform noise,
/// peak-normalized. Pure function of (spec, rate_hz, seed).
AudioClip synthesize_stroke(const StrokeSpec& spec, int rate_hz, std::uint64_t seed);

} // namespace stroketree
