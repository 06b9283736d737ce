#pragma once

#include <span>
#include <string>
#include <vector>

#include "stroketree/audio_io.hpp"

namespace stroketree {

/// Short-time analysis parameters. Defaults are standard MIR practice for
/// 44.1 kHz percussion clips.
struct AnalysisConfig {
    int frame_len = 512;            // samples, power of two
    int hop = 256;                  // samples, <= frame_len
    double rolloff_fraction = 0.85;
    int n_mels = 40;
    int n_mfcc = 13;
    double fmin_hz = 0.0;           // mel filterbank lower bound
    double fmax_hz = 0.0;           // upper bound; 0 means Nyquist
    double chroma_ref_hz = 440.0;   // tuning reference (pitch class A)
    int texture_frames = 1;         // frames per texture window; 1 = whole clip
};

/// One-sided magnitude spectrum of a windowed frame: frame_len/2 + 1 bins,
/// bin k centered at k * bin_hz.
struct SpectralFrame {
    std::vector<double> magnitudes;
    double bin_hz = 0.0;
};

/// One learning instance: aggregated feature values with matching names.
struct FeatureVector {
    std::vector<double> values;
    std::vector<std::string> names;
    std::string label;
};

/// Slices a clip into hop-spaced frames of frame_len samples. A trailing
/// remainder becomes one zero-padded frame.
std::vector<std::vector<double>> frame_signal(const AudioClip& clip, const AnalysisConfig& cfg);

/// Periodic Hann window of length n.
std::vector<double> hann_window(int n);

/// Hann-windowed DFT magnitudes of one frame (bins 0..N/2).
SpectralFrame power_spectrum(std::span<const double> frame, const AnalysisConfig& cfg,
                             int sample_rate_hz);

/// Fraction of strict sign changes (zero counts as non-negative).
double zero_crossing_rate(std::span<const double> frame);

/// Magnitude-weighted mean frequency; 0 for an all-zero spectrum.
double spectral_centroid(const SpectralFrame& spec);

/// Frequency below which `fraction` of the squared-magnitude total lies;
/// 0 for an all-zero spectrum.
double spectral_rolloff(const SpectralFrame& spec, double fraction);

/// Euclidean distance between the L1-normalized magnitude spectra of two
/// consecutive frames.
double spectral_flux(const SpectralFrame& cur, const SpectralFrame& prev);

/// HTK mel scale.
double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Orthonormal DCT-II (inverse is its transpose).
std::vector<double> dct_ii_ortho(std::span<const double> x);

/// Mel-frequency cepstral coefficients 0..n_mfcc-1 of one spectral frame.
std::vector<double> mfcc(const SpectralFrame& spec, const AnalysisConfig& cfg);

/// 12-bin pitch-class energy profile, L2-normalized, index 9 = A.
std::vector<double> chroma(const SpectralFrame& spec, const AnalysisConfig& cfg);

/// Names of the per-frame base features, in vector order: zcr, centroid,
/// roll-off, flux, n_mfcc MFCCs, 12 chroma bins. 29 under the defaults.
std::vector<std::string> base_feature_names(const AnalysisConfig& cfg);

/// Names of the aggregated features: every base name with `_mean`, then
/// every base name with `_std`. 58 under the defaults.
std::vector<std::string> aggregated_feature_names(const AnalysisConfig& cfg);

/// Full per-clip extraction: per frame the base features, grouped into
/// texture windows and aggregated by mean and population standard deviation.
/// texture_frames == 1 aggregates the whole clip into a single instance.
std::vector<FeatureVector> extract_features(const AudioClip& clip, const AnalysisConfig& cfg);

} // namespace stroketree
