#include "stroketree/audio_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "stroketree/error.hpp"
#include "stroketree/rng.hpp"

namespace stroketree {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

} // namespace

AudioClip load_wav(const std::filesystem::path& path, int expected_rate_hz) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("load_wav: no such file: " + path.string());

    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::size_t n = bytes.size();

    if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0)
        throw Error("load_wav: malformed RIFF header: " + path.string());

    bool have_fmt = false;
    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    std::size_t data_off = 0, data_len = 0;

    // Chunk walk; chunks are word-aligned.
    std::size_t off = 12;
    while (off + 8 <= n) {
        const char* id = bytes.data() + off;
        std::uint32_t sz = read_u32(p + off + 4);
        std::size_t body = off + 8;
        if (body + sz > n)
            throw Error("load_wav: malformed RIFF header: truncated chunk in " + path.string());
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (sz < 16)
                throw Error("load_wav: malformed RIFF header: short fmt chunk in " + path.string());
            format = read_u16(p + body);
            channels = read_u16(p + body + 2);
            rate = read_u32(p + body + 4);
            bits = read_u16(p + body + 14);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data_off = body;
            data_len = sz;
        }
        off = body + sz + (sz & 1);
    }

    if (!have_fmt || data_off == 0)
        throw Error("load_wav: malformed RIFF header: missing fmt or data chunk in " +
                    path.string());
    if (format != 1 || bits != 16 || channels < 1 || channels > 2)
        throw Error("load_wav: unsupported encoding (need PCM 16-bit, 1-2 channels): " +
                    path.string());
    if (static_cast<int>(rate) != expected_rate_hz)
        throw Error("load_wav: sample rate mismatch: expected " + std::to_string(expected_rate_hz) +
                    " Hz, file has " + std::to_string(rate) + " Hz: " + path.string());

    const std::size_t n_frames = data_len / (2 * channels);
    if (n_frames == 0)
        throw Error("load_wav: empty data chunk in " + path.string());

    AudioClip clip;
    clip.sample_rate_hz = expected_rate_hz;
    clip.source_id = path.string();
    clip.samples.resize(n_frames);
    const auto* d = p + data_off;
    for (std::size_t i = 0; i < n_frames; ++i) {
        double acc = 0.0;
        for (std::uint16_t c = 0; c < channels; ++c) {
            std::int16_t s =
                static_cast<std::int16_t>(read_u16(d + 2 * (i * channels + c)));
            acc += static_cast<double>(s);
        }
        clip.samples[i] = acc / channels / 32768.0;
    }
    return clip;
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
    if (clip.samples.empty() || clip.sample_rate_hz <= 0)
        throw Error("write_wav: empty clip or bad rate");

    const std::uint32_t n = static_cast<std::uint32_t>(clip.samples.size());
    const std::uint32_t data_bytes = n * 2;
    const std::uint32_t rate = static_cast<std::uint32_t>(clip.sample_rate_hz);

    std::string out;
    out.reserve(44 + data_bytes);
    out += "RIFF";
    put_u32(out, 36 + data_bytes);
    out += "WAVE";
    out += "fmt ";
    put_u32(out, 16);
    put_u16(out, 1); // PCM
    put_u16(out, 1); // mono
    put_u32(out, rate);
    put_u32(out, rate * 2); // byte rate
    put_u16(out, 2);        // block align
    put_u16(out, 16);       // bits per sample
    out += "data";
    put_u32(out, data_bytes);
    for (double x : clip.samples) {
        long q = std::lround(x * 32767.0);
        if (q > 32767) q = 32767;
        if (q < -32768) q = -32768;
        put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    }

    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("write_wav: cannot open for writing: " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f)
        throw Error("write_wav: write failed: " + path.string());
}

AudioClip clip_to_duration(const AudioClip& clip, double duration_s) {
    if (!(duration_s > 0.0))
        throw Error("clip_to_duration: duration must be positive");
    const auto target =
        static_cast<std::size_t>(std::llround(duration_s * clip.sample_rate_hz));
    AudioClip out = clip;
    out.samples.resize(target, 0.0);
    return out;
}

AudioClip peak_normalize(const AudioClip& clip) {
    double peak = 0.0;
    for (double x : clip.samples) peak = std::max(peak, std::fabs(x));
    if (peak == 0.0) return clip;
    AudioClip out = clip;
    for (double& x : out.samples) x /= peak;
    return out;
}

AudioClip synthesize_stroke(const StrokeSpec& spec, int rate_hz, std::uint64_t seed) {
    if (rate_hz <= 0)
        throw Error("synthesize_stroke: rate must be positive");
    if (spec.partial_freqs_hz.empty() || spec.partial_freqs_hz.size() != spec.partial_amps.size())
        throw Error("synthesize_stroke: partial_freqs_hz and partial_amps must be non-empty and "
                    "equal length");
    const double nyquist = rate_hz / 2.0;
    for (double f : spec.partial_freqs_hz)
        if (!(f > 0.0) || f >= nyquist)
            throw Error("synthesize_stroke: partial " + std::to_string(f) +
                        " Hz at or above Nyquist (" + std::to_string(nyquist) + " Hz)");
    if (!(spec.duration_s > 0.0))
        throw Error("synthesize_stroke: duration must be positive");

    const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * rate_hz));
    AudioClip clip;
    clip.sample_rate_hz = rate_hz;
    clip.label = spec.label;
    clip.source_id = "synth:" + spec.label;
    clip.samples.resize(n, 0.0);

    constexpr double two_pi = 6.283185307179586476925286766559;
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / rate_hz;
        const double env = std::exp(-t / spec.decay_s);
        double x = 0.0;
        for (std::size_t j = 0; j < spec.partial_freqs_hz.size(); ++j)
            x += spec.partial_amps[j] * std::sin(two_pi * spec.partial_freqs_hz[j] * t);
        x *= env;
        if (spec.noise_level > 0.0) x += spec.noise_level * rng.next_signed();
        clip.samples[i] = x;
    }
    return peak_normalize(clip);
}

} // namespace stroketree
