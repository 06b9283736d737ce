#include "stroketree/features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "stroketree/error.hpp"

namespace stroketree {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kLogFloor = 1e-10; // applied to mel filter energies before log

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void validate_config(const AnalysisConfig& cfg) {
    if (!is_power_of_two(cfg.frame_len))
        throw Error("features: frame_len must be a power of two");
    if (cfg.hop <= 0 || cfg.hop > cfg.frame_len)
        throw Error("features: hop must be in [1, frame_len]");
    if (!(cfg.rolloff_fraction > 0.0 && cfg.rolloff_fraction < 1.0))
        throw Error("features: rolloff_fraction must be in (0, 1)");
    if (cfg.n_mels <= 0 || cfg.n_mfcc <= 0)
        throw Error("features: n_mels and n_mfcc must be positive");
    if (cfg.n_mfcc > cfg.n_mels)
        throw Error("features: n_mfcc must not exceed n_mels");
    if (!(cfg.chroma_ref_hz > 0.0))
        throw Error("features: chroma_ref_hz must be positive");
    if (cfg.texture_frames <= 0)
        throw Error("features: texture_frames must be positive");
}

// Iterative radix-2 FFT, in place.
void fft_radix2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * kPi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

struct MelFilter {
    int first_bin = 0;
    std::vector<double> weights; // per bin starting at first_bin
};

std::vector<MelFilter> make_mel_filterbank(const AnalysisConfig& cfg, int n_bins, double bin_hz) {
    const double nyquist = bin_hz * (n_bins - 1);
    const double fmax = cfg.fmax_hz > 0.0 ? cfg.fmax_hz : nyquist;
    if (!(cfg.fmin_hz >= 0.0) || !(fmax > cfg.fmin_hz) || fmax > nyquist + 1e-9)
        throw Error("features: invalid mel filterbank bounds");

    const double mel_lo = hz_to_mel(cfg.fmin_hz);
    const double mel_hi = hz_to_mel(fmax);
    std::vector<double> centers(cfg.n_mels + 2);
    for (int i = 0; i < cfg.n_mels + 2; ++i)
        centers[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (cfg.n_mels + 1));

    std::vector<MelFilter> bank(cfg.n_mels);
    for (int m = 0; m < cfg.n_mels; ++m) {
        const double fl = centers[m], fc = centers[m + 1], fr = centers[m + 2];
        MelFilter filt;
        filt.first_bin = std::max(0, static_cast<int>(std::ceil(fl / bin_hz)));
        for (int k = filt.first_bin; k < n_bins; ++k) {
            const double f = k * bin_hz;
            if (f >= fr) break;
            double w = 0.0;
            if (f >= fl && f <= fc && fc > fl)
                w = (f - fl) / (fc - fl);
            else if (f > fc && f < fr && fr > fc)
                w = (fr - f) / (fr - fc);
            filt.weights.push_back(w);
        }
        bank[m] = std::move(filt);
    }
    return bank;
}

std::vector<double> apply_filterbank(const std::vector<MelFilter>& bank,
                                     const std::vector<double>& magnitudes) {
    std::vector<double> energies(bank.size(), 0.0);
    for (std::size_t m = 0; m < bank.size(); ++m) {
        double e = 0.0;
        const MelFilter& filt = bank[m];
        for (std::size_t i = 0; i < filt.weights.size(); ++i) {
            const double mag = magnitudes[filt.first_bin + i];
            e += filt.weights[i] * mag * mag;
        }
        energies[m] = e;
    }
    return energies;
}

std::vector<double> dct_ii_ortho_of(const std::vector<double>& x, int n_keep) {
    const int m = static_cast<int>(x.size());
    std::vector<double> out(n_keep, 0.0);
    const double s0 = std::sqrt(1.0 / m);
    const double sk = std::sqrt(2.0 / m);
    for (int k = 0; k < n_keep; ++k) {
        double acc = 0.0;
        for (int n = 0; n < m; ++n)
            acc += x[n] * std::cos(kPi * k * (2 * n + 1) / (2.0 * m));
        out[k] = (k == 0 ? s0 : sk) * acc;
    }
    return out;
}

// Pitch class per spectrum bin (-1 = ignored), index 9 = A when ref = A4.
std::vector<int> chroma_bin_classes(int n_bins, double bin_hz, double ref_hz) {
    std::vector<int> cls(n_bins, -1);
    for (int k = 0; k < n_bins; ++k) {
        const double f = k * bin_hz;
        if (f <= 20.0) continue;
        const long pc = std::lround(12.0 * std::log2(f / ref_hz));
        cls[k] = static_cast<int>(((pc % 12) + 12 + 9) % 12);
    }
    return cls;
}

std::vector<double> chroma_from_classes(const std::vector<int>& cls,
                                        const std::vector<double>& magnitudes) {
    std::vector<double> out(12, 0.0);
    for (std::size_t k = 0; k < magnitudes.size(); ++k)
        if (cls[k] >= 0) out[cls[k]] += magnitudes[k];
    double norm = 0.0;
    for (double v : out) norm += v * v;
    norm = std::sqrt(norm);
    if (norm > 0.0)
        for (double& v : out) v /= norm;
    return out;
}

const char* const kPitchClassNames[12] = {"C",  "Cs", "D",  "Ds", "E",  "F",
                                          "Fs", "G",  "Gs", "A",  "As", "B"};

} // namespace

std::vector<double> hann_window(int n) {
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i)
        w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * i / n));
    return w;
}

std::vector<std::vector<double>> frame_signal(const AudioClip& clip, const AnalysisConfig& cfg) {
    validate_config(cfg);
    const std::size_t len = clip.samples.size();
    const std::size_t frame_len = static_cast<std::size_t>(cfg.frame_len);
    const std::size_t hop = static_cast<std::size_t>(cfg.hop);
    if (len < frame_len)
        throw Error("frame_signal: clip shorter than one frame (" + std::to_string(len) + " < " +
                    std::to_string(frame_len) + " samples)");

    const std::size_t n_full = (len - frame_len) / hop + 1;
    const std::size_t covered = (n_full - 1) * hop + frame_len;
    const bool tail = covered < len;

    std::vector<std::vector<double>> frames;
    frames.reserve(n_full + (tail ? 1 : 0));
    for (std::size_t i = 0; i < n_full; ++i) {
        const auto* s = clip.samples.data() + i * hop;
        frames.emplace_back(s, s + frame_len);
    }
    if (tail) {
        std::vector<double> f(frame_len, 0.0);
        const std::size_t start = n_full * hop;
        std::copy(clip.samples.begin() + static_cast<std::ptrdiff_t>(start), clip.samples.end(),
                  f.begin());
        frames.push_back(std::move(f));
    }
    return frames;
}

SpectralFrame power_spectrum(std::span<const double> frame, const AnalysisConfig& cfg,
                             int sample_rate_hz) {
    validate_config(cfg);
    if (static_cast<int>(frame.size()) != cfg.frame_len)
        throw Error("power_spectrum: frame length " + std::to_string(frame.size()) +
                    " does not match configured frame_len " + std::to_string(cfg.frame_len));
    const int n = cfg.frame_len;
    const std::vector<double> window = hann_window(n);
    std::vector<std::complex<double>> buf(n);
    for (int i = 0; i < n; ++i) buf[i] = frame[i] * window[i];
    fft_radix2(buf);

    SpectralFrame out;
    out.bin_hz = static_cast<double>(sample_rate_hz) / n;
    out.magnitudes.resize(n / 2 + 1);
    for (int k = 0; k <= n / 2; ++k) out.magnitudes[k] = std::abs(buf[k]);
    return out;
}

double zero_crossing_rate(std::span<const double> frame) {
    if (frame.size() < 2)
        throw Error("zero_crossing_rate: frame must have at least 2 samples");
    std::size_t crossings = 0;
    bool prev_nonneg = frame[0] >= 0.0;
    for (std::size_t i = 1; i < frame.size(); ++i) {
        const bool nonneg = frame[i] >= 0.0;
        if (nonneg != prev_nonneg) ++crossings;
        prev_nonneg = nonneg;
    }
    return static_cast<double>(crossings) / static_cast<double>(frame.size() - 1);
}

double spectral_centroid(const SpectralFrame& spec) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < spec.magnitudes.size(); ++k) {
        num += k * spec.bin_hz * spec.magnitudes[k];
        den += spec.magnitudes[k];
    }
    return den > 0.0 ? num / den : 0.0;
}

double spectral_rolloff(const SpectralFrame& spec, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw Error("spectral_rolloff: fraction must be in (0, 1)");
    double total = 0.0;
    for (double m : spec.magnitudes) total += m * m;
    if (total == 0.0) return 0.0;
    const double target = fraction * total;
    double acc = 0.0;
    for (std::size_t k = 0; k < spec.magnitudes.size(); ++k) {
        acc += spec.magnitudes[k] * spec.magnitudes[k];
        if (acc >= target) return k * spec.bin_hz;
    }
    return (spec.magnitudes.size() - 1) * spec.bin_hz;
}

double spectral_flux(const SpectralFrame& cur, const SpectralFrame& prev) {
    if (cur.magnitudes.size() != prev.magnitudes.size())
        throw Error("spectral_flux: bin-count mismatch");
    const auto l1 = [](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0);
    };
    const double na = l1(cur.magnitudes), nb = l1(prev.magnitudes);
    double acc = 0.0;
    for (std::size_t k = 0; k < cur.magnitudes.size(); ++k) {
        const double a = na > 0.0 ? cur.magnitudes[k] / na : 0.0;
        const double b = nb > 0.0 ? prev.magnitudes[k] / nb : 0.0;
        acc += (a - b) * (a - b);
    }
    return std::sqrt(acc);
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> dct_ii_ortho(std::span<const double> x) {
    std::vector<double> v(x.begin(), x.end());
    return dct_ii_ortho_of(v, static_cast<int>(v.size()));
}

std::vector<double> mfcc(const SpectralFrame& spec, const AnalysisConfig& cfg) {
    validate_config(cfg);
    const int n_bins = static_cast<int>(spec.magnitudes.size());
    const auto bank = make_mel_filterbank(cfg, n_bins, spec.bin_hz);
    std::vector<double> energies = apply_filterbank(bank, spec.magnitudes);
    for (double& e : energies) e = std::log(std::max(e, kLogFloor));
    return dct_ii_ortho_of(energies, cfg.n_mfcc);
}

std::vector<double> chroma(const SpectralFrame& spec, const AnalysisConfig& cfg) {
    validate_config(cfg);
    const auto cls = chroma_bin_classes(static_cast<int>(spec.magnitudes.size()), spec.bin_hz,
                                        cfg.chroma_ref_hz);
    return chroma_from_classes(cls, spec.magnitudes);
}

std::vector<std::string> base_feature_names(const AnalysisConfig& cfg) {
    std::vector<std::string> v = {"zcr", "spectral_centroid", "spectral_rolloff",
                                  "spectral_flux"};
    for (int i = 0; i < cfg.n_mfcc; ++i) v.push_back("mfcc" + std::to_string(i));
    for (const char* pc : kPitchClassNames) v.push_back(std::string("chroma_") + pc);
    return v;
}

std::vector<std::string> aggregated_feature_names(const AnalysisConfig& cfg) {
    const auto base = base_feature_names(cfg);
    std::vector<std::string> v;
    v.reserve(2 * base.size());
    for (const auto& n : base) v.push_back(n + "_mean");
    for (const auto& n : base) v.push_back(n + "_std");
    return v;
}

std::vector<FeatureVector> extract_features(const AudioClip& clip, const AnalysisConfig& cfg) {
    validate_config(cfg);

    const auto frames = frame_signal(clip, cfg);
    const int n_bins = cfg.frame_len / 2 + 1;
    const double bin_hz = static_cast<double>(clip.sample_rate_hz) / cfg.frame_len;

    // Precomputed per-clip state: window, filterbank, chroma bin map.
    const std::vector<double> window = hann_window(cfg.frame_len);
    const auto bank = make_mel_filterbank(cfg, n_bins, bin_hz);
    const auto chroma_cls = chroma_bin_classes(n_bins, bin_hz, cfg.chroma_ref_hz);

    const std::vector<std::string> agg_names = aggregated_feature_names(cfg);
    const std::size_t n_base = agg_names.size() / 2;
    std::vector<std::vector<double>> per_frame;
    per_frame.reserve(frames.size());

    SpectralFrame prev;
    prev.bin_hz = bin_hz;
    prev.magnitudes.assign(n_bins, 0.0);

    std::vector<std::complex<double>> buf(cfg.frame_len);
    for (const auto& frame : frames) {
        for (int i = 0; i < cfg.frame_len; ++i) buf[i] = frame[i] * window[i];
        fft_radix2(buf);
        SpectralFrame spec;
        spec.bin_hz = bin_hz;
        spec.magnitudes.resize(n_bins);
        for (int k = 0; k < n_bins; ++k) spec.magnitudes[k] = std::abs(buf[k]);

        std::vector<double> row;
        row.reserve(n_base);
        row.push_back(zero_crossing_rate(frame));
        row.push_back(spectral_centroid(spec));
        row.push_back(spectral_rolloff(spec, cfg.rolloff_fraction));
        row.push_back(spectral_flux(spec, prev));

        std::vector<double> energies = apply_filterbank(bank, spec.magnitudes);
        for (double& e : energies) e = std::log(std::max(e, kLogFloor));
        for (double c : dct_ii_ortho_of(energies, cfg.n_mfcc)) row.push_back(c);

        for (double c : chroma_from_classes(chroma_cls, spec.magnitudes)) row.push_back(c);

        per_frame.push_back(std::move(row));
        prev = std::move(spec);
    }

    // Texture windows: mean and population std of every base feature.
    const std::size_t window_frames =
        cfg.texture_frames == 1 ? per_frame.size() : static_cast<std::size_t>(cfg.texture_frames);

    std::vector<FeatureVector> out;
    for (std::size_t start = 0; start < per_frame.size(); start += window_frames) {
        const std::size_t end = std::min(start + window_frames, per_frame.size());
        const double n = static_cast<double>(end - start);
        FeatureVector fv;
        fv.names = agg_names;
        fv.label = clip.label;
        fv.values.resize(2 * n_base, 0.0);
        for (std::size_t j = 0; j < n_base; ++j) {
            double mean = 0.0;
            for (std::size_t i = start; i < end; ++i) mean += per_frame[i][j];
            mean /= n;
            double var = 0.0;
            for (std::size_t i = start; i < end; ++i) {
                const double d = per_frame[i][j] - mean;
                var += d * d;
            }
            var /= n;
            fv.values[j] = mean;
            fv.values[n_base + j] = std::sqrt(var);
        }
        out.push_back(std::move(fv));
    }
    return out;
}

} // namespace stroketree
