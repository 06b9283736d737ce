// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Oracles here are independent re-implementations; they never
// call the code path they check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "stroketree/corpus.hpp"
#include "stroketree/dataset.hpp"
#include "stroketree/error.hpp"
#include "stroketree/eval.hpp"
#include "stroketree/features.hpp"
#include "stroketree/forest.hpp"
#include "stroketree/model_io.hpp"
#include "stroketree/rng.hpp"
#include "stroketree/trees.hpp"

namespace fs = std::filesystem;
using namespace stroketree;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int num, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", num, name.c_str(),
                detail.empty() ? "" : " | ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------------------
// criterion 1: impurity oracles

void criterion_impurity() {
    const auto start = Clock::now();
    bool pass = true;
    std::string detail;
    try {
        ClassDistribution even;
        even.counts = {4, 4};
        pass &= entropy(even) == 1.0;

        ClassDistribution balanced13;
        balanced13.counts.assign(13, 50);
        const double gini = gini_impurity(balanced13);
        pass &= std::fabs(gini - 12.0 / 13.0) < 1e-12;

        Rng rng(20240601);
        std::size_t checked = 0;
        for (int it = 0; it < 10000; ++it) {
            const int n_classes = 2 + static_cast<int>(rng.next_index(12));
            const int n_children = 2 + static_cast<int>(rng.next_index(4));
            ClassDistribution parent(n_classes);
            std::vector<ClassDistribution> children(n_children, ClassDistribution(n_classes));
            const int n_items = 1 + static_cast<int>(rng.next_index(80));
            for (int i = 0; i < n_items; ++i) {
                const int c = static_cast<int>(rng.next_index(n_classes));
                parent.add(c);
                children[rng.next_index(n_children)].add(c);
            }
            if (information_gain(parent, children) < 0.0) {
                pass = false;
                break;
            }
            ++checked;
        }
        const double elapsed = seconds_since(start);
        pass &= elapsed < 1.0;
        detail = fmt("entropy([4,4])=1 exact, gini(13x50)=%.15f, %zu gains >= 0, %.2fs", gini,
                     checked, elapsed);
    } catch (const std::exception& e) {
        pass = false;
        detail = e.what();
    }
    report(1, "impurity oracles", pass, detail);
}

// ---------------------------------------------------------------------------
// criterion 2: split-search equivalence against an exhaustive oracle

double oracle_impurity(const std::vector<std::size_t>& counts, Criterion crit) {
    std::size_t n = 0;
    for (std::size_t c : counts) n += c;
    double acc = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(n);
        acc += crit == Criterion::gini ? p * p : -p * std::log2(p);
    }
    return crit == Criterion::gini ? 1.0 - acc : acc;
}

struct OracleSplit {
    int feature;
    double threshold;
};

std::optional<OracleSplit> oracle_split(const std::vector<std::vector<double>>& x,
                                        const std::vector<int>& y, int n_classes,
                                        Criterion crit) {
    const std::size_t n = x.size();
    std::vector<std::size_t> parent(n_classes, 0);
    for (int label : y) ++parent[label];
    const double parent_impurity = oracle_impurity(parent, crit);

    std::optional<OracleSplit> best;
    double best_gain = 0.0;
    for (std::size_t f = 0; f < x[0].size(); ++f) {
        std::vector<double> values;
        for (const auto& xi : x) values.push_back(xi[f]);
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t g = 0; g + 1 < values.size(); ++g) {
            const double t = (values[g] + values[g + 1]) / 2.0;
            std::vector<std::size_t> left(n_classes, 0), right(n_classes, 0);
            std::size_t ln = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (x[i][f] <= t) {
                    ++left[y[i]];
                    ++ln;
                } else {
                    ++right[y[i]];
                }
            }
            if (ln == 0 || ln == n) continue;
            const double gain = parent_impurity -
                                (static_cast<double>(ln) / n) * oracle_impurity(left, crit) -
                                (static_cast<double>(n - ln) / n) * oracle_impurity(right, crit);
            if (gain > best_gain) {
                best_gain = gain;
                best = OracleSplit{static_cast<int>(f), t};
            }
        }
    }
    return best;
}

Dataset index_table(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                    int n_classes) {
    Dataset ds;
    for (std::size_t f = 0; f < x[0].size(); ++f) ds.feature_names.push_back("f" + std::to_string(f));
    for (int c = 0; c < n_classes; ++c) ds.class_names.push_back("c" + std::to_string(c));
    for (std::size_t i = 0; i < x.size(); ++i) {
        FeatureVector fv;
        fv.names = ds.feature_names;
        fv.values = x[i];
        fv.label = "c" + std::to_string(y[i]);
        ds.rows.push_back(std::move(fv));
    }
    return ds;
}

void criterion_split_search() {
    const auto start = Clock::now();
    bool pass = true;
    std::string detail;
    try {
        Rng rng(777);
        int agreements = 0;
        for (int trial = 0; trial < 500 && pass; ++trial) {
            const int n_rows = 2 + static_cast<int>(rng.next_index(49));
            const int n_features = 1 + static_cast<int>(rng.next_index(5));
            const int n_classes = 2 + static_cast<int>(rng.next_index(4));
            const bool quantized = trial % 2 == 0;

            std::vector<std::vector<double>> x(n_rows, std::vector<double>(n_features));
            std::vector<int> y(n_rows);
            for (int i = 0; i < n_rows; ++i) {
                y[i] = static_cast<int>(rng.next_index(n_classes));
                for (int f = 0; f < n_features; ++f)
                    x[i][f] = quantized ? 0.25 * static_cast<double>(rng.next_index(6))
                                        : rng.next_double();
            }
            y[0] = 0;
            y[n_rows - 1] = 1;

            const Criterion crit = trial % 3 == 0 ? Criterion::entropy : Criterion::gini;
            Dataset ds = index_table(x, y, n_classes);
            std::vector<std::size_t> rows(ds.rows.size());
            std::iota(rows.begin(), rows.end(), 0);
            std::vector<int> features(ds.feature_names.size());
            std::iota(features.begin(), features.end(), 0);

            const auto got = best_binary_split(ds, rows, features, crit);
            const auto want = oracle_split(x, y, n_classes, crit);
            if (got.has_value() != want.has_value()) {
                pass = false;
            } else if (got && (got->feature != want->feature || got->threshold != want->threshold)) {
                pass = false;
            } else {
                ++agreements;
            }
        }
        const double elapsed = seconds_since(start);
        pass &= elapsed < 30.0;
        detail = fmt("%d/500 tables agree on (feature, threshold), %.2fs", agreements, elapsed);
    } catch (const std::exception& e) {
        pass = false;
        detail = e.what();
    }
    report(2, "split-search equivalence", pass, detail);
}

// ---------------------------------------------------------------------------
// criterion 3: DSP oracles

std::vector<std::complex<double>> direct_dft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    const double two_pi = 6.283185307179586476925286766559;
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            const double ang = -two_pi * static_cast<double>(k) * static_cast<double>(t) /
                               static_cast<double>(n);
            acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

void criterion_dsp() {
    const auto start = Clock::now();
    bool pass = true;
    std::string detail;
    try {
        // Spectrum vs direct summation on a random 32-sample frame.
        AnalysisConfig small;
        small.frame_len = 32;
        small.hop = 16;
        Rng rng(31337);
        std::vector<double> frame(32);
        for (double& v : frame) v = rng.next_signed();
        const SpectralFrame spec = power_spectrum(frame, small, 44100);
        const auto window = hann_window(32);
        std::vector<double> windowed(32);
        for (int i = 0; i < 32; ++i) windowed[i] = frame[i] * window[i];
        const auto oracle = direct_dft(windowed);
        double err2 = 0.0, ref2 = 0.0;
        for (int k = 0; k <= 16; ++k) {
            const double d = spec.magnitudes[k] - std::abs(oracle[k]);
            err2 += d * d;
            ref2 += std::norm(oracle[k]);
        }
        const double spec_err = std::sqrt(err2 / ref2);
        pass &= spec_err < 1e-6;

        // DCT-II then its direct inverse on a random 40-point vector.
        std::vector<double> v40(40);
        for (double& v : v40) v = rng.next_signed();
        const auto coeffs = dct_ii_ortho(v40);
        double dct_err = 0.0;
        for (int n = 0; n < 40; ++n) {
            double acc = std::sqrt(1.0 / 40.0) * coeffs[0];
            for (int k = 1; k < 40; ++k)
                acc += std::sqrt(2.0 / 40.0) * coeffs[k] *
                       std::cos(M_PI * k * (2 * n + 1) / 80.0);
            dct_err = std::max(dct_err, std::fabs(acc - v40[n]));
        }
        pass &= dct_err < 1e-9;

        // ZCR of a rendered 100 Hz sine: 200 crossings per second, +-1.
        std::vector<double> sine(44100);
        for (int i = 0; i < 44100; ++i) sine[i] = std::sin(2.0 * M_PI * 100.0 * i / 44100.0);
        const long crossings = std::lround(zero_crossing_rate(sine) * 44099.0);
        pass &= std::labs(crossings - 200) <= 1;

        // Centroid of a single 1 kHz partial, via the analysis pipeline.
        StrokeSpec one;
        one.label = "k";
        one.partial_freqs_hz = {1000.0};
        one.partial_amps = {1.0};
        one.decay_s = 0.3;
        one.noise_level = 0.0;
        one.duration_s = 0.1;
        const AudioClip clip = synthesize_stroke(one, 44100, 9);
        AnalysisConfig cfg;
        const auto frames = frame_signal(clip, cfg);
        const SpectralFrame sf = power_spectrum(frames[0], cfg, 44100);
        const double centroid = spectral_centroid(sf);
        pass &= std::fabs(centroid - 1000.0) < 25.0;

        const double elapsed = seconds_since(start);
        pass &= elapsed < 10.0;
        detail = fmt("spectrum rel err %.1e, dct err %.1e, crossings %ld, centroid %.1f Hz, %.2fs",
                     spec_err, dct_err, crossings, centroid, elapsed);
    } catch (const std::exception& e) {
        pass = false;
        detail = e.what();
    }
    report(3, "dsp oracles", pass, detail);
}

// ---------------------------------------------------------------------------
// criterion 4: trapezoidal AUC vs the pair-counting oracle

void criterion_auc() {
    const auto start = Clock::now();
    bool pass = true;
    std::string detail;
    try {
        Rng rng(909090);
        int checked = 0;
        double worst = 0.0;
        while (checked < 200) {
            const int n = 5 + static_cast<int>(rng.next_index(96));
            std::vector<std::vector<double>> scores(n, std::vector<double>(2));
            std::vector<int> truths(n);
            bool has_pos = false, has_neg = false;
            for (int i = 0; i < n; ++i) {
                double s = rng.next_double();
                if (checked % 2 == 1) s = std::round(s * 10.0) / 10.0; // tie-heavy sets
                scores[i][0] = s;
                scores[i][1] = 1.0 - s;
                truths[i] = static_cast<int>(rng.next_index(2));
                (truths[i] == 0 ? has_pos : has_neg) = true;
            }
            if (!has_pos || !has_neg) continue;

            const RocCurve curve = roc_one_vs_rest(scores, truths, 0);
            // Oracle: P(score_pos > score_neg) + 0.5 P(tie) over all pairs.
            double wins = 0.0;
            std::size_t pairs = 0;
            for (int i = 0; i < n; ++i) {
                if (truths[i] != 0) continue;
                for (int j = 0; j < n; ++j) {
                    if (truths[j] == 0) continue;
                    ++pairs;
                    if (scores[i][0] > scores[j][0])
                        wins += 1.0;
                    else if (scores[i][0] == scores[j][0])
                        wins += 0.5;
                }
            }
            const double oracle = wins / static_cast<double>(pairs);
            worst = std::max(worst, std::fabs(curve.auc - oracle));
            if (std::fabs(curve.auc - oracle) >= 1e-9) {
                pass = false;
                break;
            }
            ++checked;
        }
        const double elapsed = seconds_since(start);
        pass &= elapsed < 5.0;
        detail = fmt("%d score sets, max |auc - oracle| = %.2e, %.2fs", checked, worst, elapsed);
    } catch (const std::exception& e) {
        pass = false;
        detail = e.what();
    }
    report(4, "auc oracle", pass, detail);
}

// ---------------------------------------------------------------------------
// criteria 5, 6, 8: full-scale experiment on the default synthetic corpus

struct PipelineResult {
    Dataset train, test;
    TreeModel cart;
    TreeModel id3;
    ForestModel forest;
    EvalReport cart_report, id3_report, forest_report;
    bool ok = false;
    std::string error;
};

EvalReport report_for(const Dataset& test, const std::vector<std::string>& classes,
                      const std::function<Prediction(const FeatureVector&)>& predict_fn) {
    std::vector<std::pair<int, int>> pairs;
    for (const auto& row : test.rows) {
        int truth = -1;
        for (std::size_t c = 0; c < classes.size(); ++c)
            if (classes[c] == row.label) truth = static_cast<int>(c);
        pairs.emplace_back(truth, predict_fn(row).label_index);
    }
    return evaluate(pairs, static_cast<int>(classes.size()));
}

PipelineResult run_pipeline(const fs::path& scratch) {
    PipelineResult r;
    try {
        const fs::path corpus = scratch / "corpus";
        generate_corpus(default_stroke_presets(), 50, 44100, 42, corpus);

        AnalysisConfig cfg;
        Dataset ds = extract_directory(corpus, cfg, 44100, 0.5);
        std::tie(r.train, r.test) = train_test_split(ds, 0.7, 42);

        TreeParams cart_params; // gini
        r.cart = fit_cart(r.train, cart_params);
        r.id3 = fit_id3(r.train, TreeParams{});
        ForestParams fp;
        fp.seed = 42;
        r.forest = fit_forest(r.train, fp);

        const auto& classes = ds.class_names;
        r.cart_report = report_for(r.test, classes,
                                   [&](const FeatureVector& x) { return predict(r.cart, x); });
        r.id3_report = report_for(r.test, classes,
                                  [&](const FeatureVector& x) { return predict(r.id3, x); });
        r.forest_report = report_for(
            r.test, classes, [&](const FeatureVector& x) { return predict_majority(r.forest, x); });
        r.ok = true;
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    return r;
}

void criterion_accuracy_ordering(const PipelineResult& p, double elapsed_s) {
    bool pass = p.ok;
    std::string detail = p.error;
    if (p.ok) {
        const double cart = p.cart_report.accuracy;
        const double id3 = p.id3_report.accuracy;
        const double forest = p.forest_report.accuracy;
        pass = forest >= cart && cart >= 0.95 && forest >= 0.97 && std::fabs(id3 - cart) <= 0.05 &&
               elapsed_s < 120.0;
        detail = fmt("forest %.4f >= cart %.4f >= 0.95, forest >= 0.97, id3 %.4f within 0.05, %.1fs",
                     forest, cart, id3, elapsed_s);
    }
    report(5, "accuracy ordering on the synthetic corpus", pass, detail);
}

void criterion_overlapping_pair(const PipelineResult& p, double elapsed_s) {
    bool pass = p.ok;
    std::string detail = p.error;
    if (p.ok) {
        const auto [a, b] = overlapping_pair();
        const auto index_of = [&](const std::string& label) {
            for (std::size_t c = 0; c < p.train.class_names.size(); ++c)
                if (p.train.class_names[c] == label) return static_cast<int>(c);
            return -1;
        };
        const int ia = index_of(a), ib = index_of(b);
        if (ia < 0 || ib < 0) {
            pass = false;
            detail = "overlapping pair labels missing from the corpus";
        } else {
            const double fa = p.forest_report.per_class[ia].recall;
            const double fb = p.forest_report.per_class[ib].recall;
            const double ca = p.cart_report.per_class[ia].recall;
            const double cb = p.cart_report.per_class[ib].recall;
            pass = fa >= 0.85 && fb >= 0.85 && fa > ca && fb > cb && elapsed_s < 120.0;
            detail = fmt("%s: forest %.4f vs cart %.4f; %s: forest %.4f vs cart %.4f; %.1fs",
                         a.c_str(), fa, ca, b.c_str(), fb, cb, elapsed_s);
        }
    }
    report(6, "overlapping-pair recall", pass, detail);
}

// ---------------------------------------------------------------------------
// criterion 7: byte-identical end-to-end runs through the CLI

int run_cli(const std::string& args) {
    const std::string cmd = std::string(STROKETREE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

void criterion_determinism(const fs::path& scratch) {
    bool pass = true;
    std::string detail;
    try {
        std::vector<std::string> compared;
        for (const char* run : {"run1", "run2"}) {
            const fs::path d = scratch / run;
            const std::string base = d.string();
            if (run_cli("synth --out " + base + "/corpus --per-class 50 --seed 42") != 0 ||
                run_cli("extract --in " + base + "/corpus --out " + base + "/features.csv") != 0 ||
                run_cli("train --csv " + base + "/features.csv --algo forest --model-out " + base +
                        "/forest.json --test-out " + base + "/test.csv") != 0 ||
                run_cli("evaluate --model " + base + "/forest.json --csv " + base +
                        "/test.csv --out " + base + "/report --pair ti,ta") != 0)
                throw Error("a pipeline stage exited nonzero in " + base);
        }
        std::vector<fs::path> files = {"features.csv", "test.csv", "forest.json",
                                       "forest.json.summary.txt", "report/report.txt",
                                       "report/report.csv", "report/confusion.csv"};
        for (int k = 0; k < 13; ++k)
            files.push_back(fs::path("report") / ("roc_class_" + std::to_string(k) + ".csv"));
        for (const auto& rel : files) {
            const std::string a = slurp(scratch / "run1" / rel);
            const std::string b = slurp(scratch / "run2" / rel);
            if (a.empty() || a != b) {
                pass = false;
                detail = "mismatch or empty: " + rel.string();
                break;
            }
            compared.push_back(rel.string());
        }
        if (pass) detail = fmt("%zu files byte-identical across runs", compared.size());
    } catch (const std::exception& e) {
        pass = false;
        detail = e.what();
    }
    report(7, "pipeline determinism", pass, detail);
}

// ---------------------------------------------------------------------------
// criterion 8: DOT render contract for gini and entropy trees

bool dot_is_well_formed(const std::string& dot) {
    if (dot.rfind("digraph", 0) != 0) return false;
    int depth = 0;
    for (char c : dot) {
        if (c == '{') ++depth;
        if (c == '}') --depth;
        if (depth < 0) return false;
    }
    if (depth != 0) return false;
    // Every edge endpoint must be a declared node.
    std::set<std::string> declared;
    std::istringstream ss(dot);
    std::string line;
    std::vector<std::pair<std::string, std::string>> edges;
    while (std::getline(ss, line)) {
        const auto arrow = line.find(" -> ");
        if (arrow != std::string::npos) {
            const auto from_start = line.find_first_not_of(' ');
            std::string from = line.substr(from_start, arrow - from_start);
            std::string to = line.substr(arrow + 4);
            to = to.substr(0, to.find_first_of(" ;["));
            edges.emplace_back(from, to);
        } else if (const auto bracket = line.find(" [label="); bracket != std::string::npos) {
            const auto start = line.find_first_not_of(' ');
            declared.insert(line.substr(start, bracket - start));
        }
    }
    for (const auto& [from, to] : edges)
        if (!declared.contains(from) || !declared.contains(to)) return false;
    return true;
}

// Criterion value printed in the root node's label, e.g. "gini = 0.9231".
std::optional<double> root_annotation(const std::string& dot, const std::string& key) {
    const auto n0 = dot.find("N0 [label=\"");
    if (n0 == std::string::npos) return std::nullopt;
    const auto key_pos = dot.find(key + " = ", n0);
    if (key_pos == std::string::npos) return std::nullopt;
    return std::stod(dot.substr(key_pos + key.size() + 3));
}

void criterion_dot_render(const PipelineResult& p) {
    bool pass = p.ok;
    std::string detail = p.error;
    if (p.ok) {
        try {
            TreeParams gini_params;
            gini_params.criterion = Criterion::gini;
            TreeParams entropy_params;
            entropy_params.criterion = Criterion::entropy;
            const std::string gini_dot = export_dot(fit_cart(p.train, gini_params));
            const std::string entropy_dot = export_dot(fit_cart(p.train, entropy_params));

            const auto g = root_annotation(gini_dot, "gini");
            const auto h = root_annotation(entropy_dot, "entropy");
            pass = dot_is_well_formed(gini_dot) && dot_is_well_formed(entropy_dot) &&
                   g.has_value() && h.has_value() && std::fabs(*g - 12.0 / 13.0) < 0.01 &&
                   std::fabs(*h - std::log2(13.0)) < 0.01;
            detail = fmt("root gini %.4f (12/13 = %.4f), root entropy %.4f (log2 13 = %.4f)",
                         g.value_or(-1.0), 12.0 / 13.0, h.value_or(-1.0), std::log2(13.0));
        } catch (const std::exception& e) {
            pass = false;
            detail = e.what();
        }
    }
    report(8, "tree-render contract", pass, detail);
}

} // namespace

int main() {
    const fs::path scratch =
        fs::temp_directory_path() / ("stroketree_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(scratch);

    criterion_impurity();
    criterion_split_search();
    criterion_dsp();
    criterion_auc();

    const auto pipeline_start = Clock::now();
    const PipelineResult pipeline = run_pipeline(scratch);
    const double pipeline_s = seconds_since(pipeline_start);
    criterion_accuracy_ordering(pipeline, pipeline_s);
    criterion_overlapping_pair(pipeline, pipeline_s);
    criterion_determinism(scratch);
    criterion_dot_render(pipeline);

    std::error_code ec;
    fs::remove_all(scratch, ec);

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
