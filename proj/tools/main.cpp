// stroketree command-line driver: synth -> extract -> train -> evaluate,
// plus DOT export of trained trees.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stroketree/corpus.hpp"
#include "stroketree/dataset.hpp"
#include "stroketree/error.hpp"
#include "stroketree/eval.hpp"
#include "stroketree/forest.hpp"
#include "stroketree/model_io.hpp"
#include "stroketree/trees.hpp"

namespace fs = std::filesystem;
using namespace stroketree;

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

// Records every path a command writes; on failure the command removes them
// so a nonzero exit never leaves partial outputs behind.
struct OutputGuard {
    std::vector<fs::path> paths;

    void add(const fs::path& p) { paths.push_back(p); }

    void discard_all() {
        // Files first, then directories (deepest first).
        std::error_code ec;
        for (auto it = paths.rbegin(); it != paths.rend(); ++it)
            if (fs::is_regular_file(*it)) fs::remove(*it, ec);
        std::vector<fs::path> dirs;
        for (const auto& p : paths)
            if (fs::is_directory(p)) dirs.push_back(p);
        std::sort(dirs.begin(), dirs.end(), [](const fs::path& a, const fs::path& b) {
            return a.string().size() > b.string().size();
        });
        for (const auto& d : dirs) fs::remove(d, ec); // only removes empty dirs
    }
};

void write_text_file(const fs::path& path, const std::string& text, OutputGuard& guard) {
    guard.add(path);
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot open for writing: " + path.string());
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f)
        throw Error("write failed: " + path.string());
}

struct Scored {
    EvalReport report;
    std::vector<std::vector<double>> scores; // per instance, per class
    std::vector<int> truths;
};

Scored score_dataset(const AnyModel& model, const Dataset& ds) {
    const auto& classes = model_class_names(model);
    if (model_feature_names(model) != ds.feature_names)
        throw Error("feature-name mismatch between model and data");

    Scored out;
    std::vector<std::pair<int, int>> pairs;
    for (const auto& row : ds.rows) {
        int truth = -1;
        for (std::size_t c = 0; c < classes.size(); ++c)
            if (classes[c] == row.label) truth = static_cast<int>(c);
        if (truth < 0)
            throw Error("label '" + row.label + "' is not one of the model's classes");
        const Prediction p = model_predict(model, row);
        pairs.emplace_back(truth, p.label_index);
        out.scores.push_back(p.scores);
        out.truths.push_back(truth);
    }
    out.report = evaluate(pairs, static_cast<int>(classes.size()));
    return out;
}

double accuracy_on(const AnyModel& model, const Dataset& ds) {
    return score_dataset(model, ds).report.accuracy;
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
    std::string out_dir;
    std::string spec_file;
    int per_class = 50;
    int rate = 44100;
    std::uint64_t seed = kDefaultSeed;
};

int cmd_synth(const SynthArgs& args) {
    std::vector<fs::path> written;
    try {
        const std::vector<StrokeSpec> specs = args.spec_file.empty()
                                                  ? default_stroke_presets()
                                                  : parse_stroke_spec_file(args.spec_file);
        generate_corpus(specs, args.per_class, args.rate, args.seed, args.out_dir, &written);
        std::cout << "wrote " << specs.size() * static_cast<std::size_t>(args.per_class)
                  << " clips in " << specs.size() << " classes under " << args.out_dir << "\n";
        return 0;
    } catch (...) {
        OutputGuard guard;
        guard.paths = std::move(written);
        guard.discard_all();
        throw;
    }
}

// ---- extract ----------------------------------------------------------------

struct ExtractArgs {
    std::string in_dir;
    std::string out_csv;
    int rate = 44100;
    double duration = 0.5;
    AnalysisConfig cfg{};
};

int cmd_extract(const ExtractArgs& args) {
    OutputGuard guard;
    try {
        Dataset ds = extract_directory(args.in_dir, args.cfg, args.rate, args.duration);
        guard.add(args.out_csv);
        write_csv(ds, args.out_csv);
        std::cout << "wrote " << ds.rows.size() << " instances x " << ds.feature_names.size()
                  << " features (" << ds.class_names.size() << " classes) to " << args.out_csv
                  << "\n";
        return 0;
    } catch (...) {
        guard.discard_all();
        throw;
    }
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
    std::string csv;
    std::string algo;
    std::string model_out;
    std::string criterion = "gini";
    int max_depth = -1; // -1 = unlimited
    int min_leaf = 1;
    double min_gain = 0.0;
    int bins = 8;
    int trees = 100;
    int mtry = 0;
    std::uint64_t seed = kDefaultSeed;
    std::uint64_t split_seed = kDefaultSeed;
    double train_fraction = 0.7;
    std::string test_csv;
    std::string train_out;
    std::string test_out;
};

int cmd_train(const TrainArgs& args) {
    if (args.algo != "cart" && args.algo != "id3" && args.algo != "forest")
        throw Error("unknown algorithm '" + args.algo + "' (expected cart, id3, or forest)");

    OutputGuard guard;
    try {
        Dataset full = read_csv(args.csv);
        Dataset train, test;
        if (!args.test_csv.empty()) {
            train = std::move(full);
            test = read_csv(args.test_csv);
            if (test.feature_names != train.feature_names)
                throw Error("feature-name mismatch between " + args.csv + " and " +
                            args.test_csv);
        } else {
            std::tie(train, test) = train_test_split(full, args.train_fraction, args.split_seed);
        }
        if (!args.train_out.empty()) {
            guard.add(args.train_out);
            write_csv(train, args.train_out);
        }
        if (!args.test_out.empty()) {
            guard.add(args.test_out);
            write_csv(test, args.test_out);
        }

        TreeParams tree_params;
        tree_params.criterion = criterion_from_name(args.criterion);
        if (args.max_depth >= 0) tree_params.max_depth = args.max_depth;
        tree_params.min_leaf = args.min_leaf;
        tree_params.min_gain = args.min_gain;
        tree_params.id3_bins = args.bins;

        AnyModel model{TreeModel{}};
        if (args.algo == "cart") {
            model = fit_cart(train, tree_params);
            save_model_file(args.model_out, std::get<TreeModel>(model));
        } else if (args.algo == "id3") {
            model = fit_id3(train, tree_params);
            save_model_file(args.model_out, std::get<TreeModel>(model));
        } else {
            ForestParams fp;
            fp.n_trees = args.trees;
            fp.mtry = args.mtry;
            fp.seed = args.seed;
            fp.tree_params = tree_params;
            model = fit_forest(train, fp);
            save_model_file(args.model_out, std::get<ForestModel>(model));
        }
        guard.add(args.model_out);

        const double train_acc = accuracy_on(model, train);
        std::string test_line = "n/a (0 rows)";
        if (!test.rows.empty()) {
            char t[32];
            std::snprintf(t, sizeof(t), "%.6f", accuracy_on(model, test));
            test_line = t;
        }
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "algorithm: %s\ncriterion: %s\ntrain rows: %zu\ntest rows: %zu\n"
                      "train accuracy: %.6f\ntest accuracy: %s\n",
                      args.algo.c_str(), args.criterion.c_str(), train.rows.size(),
                      test.rows.size(), train_acc, test_line.c_str());
        write_text_file(args.model_out + ".summary.txt", buf, guard);
        std::cout << buf;
        return 0;
    } catch (...) {
        guard.discard_all();
        throw;
    }
}

// ---- evaluate ----------------------------------------------------------------

struct EvaluateArgs {
    std::string model_file;
    std::string csv;
    std::string out_dir;
    std::string pair; // "label_a,label_b"
};

int cmd_evaluate(const EvaluateArgs& args) {
    OutputGuard guard;
    try {
        const AnyModel model = load_model_file(args.model_file);
        const Dataset ds = read_csv(args.csv);
        const auto& classes = model_class_names(model);

        const Scored scored = score_dataset(model, ds);

        if (!fs::exists(args.out_dir)) {
            fs::create_directories(args.out_dir);
            guard.add(args.out_dir);
        }
        const fs::path out = args.out_dir;

        std::string text = report_text(scored.report, classes);

        if (!args.pair.empty()) {
            const auto comma = args.pair.find(',');
            if (comma == std::string::npos)
                throw Error("--pair expects two comma-separated labels");
            const std::string a = args.pair.substr(0, comma);
            const std::string b = args.pair.substr(comma + 1);
            text += "\noverlapping pair:\n";
            for (const std::string& label : {a, b}) {
                int idx = -1;
                for (std::size_t c = 0; c < classes.size(); ++c)
                    if (classes[c] == label) idx = static_cast<int>(c);
                if (idx < 0)
                    throw Error("--pair label '" + label + "' is not one of the model's classes");
                char line[128];
                std::snprintf(line, sizeof(line), "  %s: recall %.4f\n", label.c_str(),
                              scored.report.per_class[idx].recall);
                text += line;
            }
        }

        // One-vs-rest ROC per class; classes without both positives and
        // negatives in this data cannot have a curve and are listed instead.
        std::vector<std::string> skipped;
        std::vector<std::pair<fs::path, std::string>> roc_files;
        for (std::size_t k = 0; k < classes.size(); ++k) {
            std::size_t pos = 0;
            for (int t : scored.truths) pos += t == static_cast<int>(k);
            if (pos == 0 || pos == scored.truths.size()) {
                skipped.push_back(classes[k]);
                continue;
            }
            const RocCurve curve =
                roc_one_vs_rest(scored.scores, scored.truths, static_cast<int>(k));
            char name[64];
            std::snprintf(name, sizeof(name), "roc_class_%zu.csv", k);
            roc_files.emplace_back(out / name, roc_csv(curve));
            char aucline[128];
            std::snprintf(aucline, sizeof(aucline), "auc[%s] = %.6f\n", classes[k].c_str(),
                          curve.auc);
            if (k == 0) text += "\n";
            text += aucline;
        }
        if (!skipped.empty()) {
            text += "roc skipped (degenerate in data): ";
            for (std::size_t i = 0; i < skipped.size(); ++i)
                text += (i ? ", " : "") + skipped[i];
            text += "\n";
        }

        write_text_file(out / "report.txt", text, guard);
        write_text_file(out / "report.csv", report_csv(scored.report, classes), guard);
        write_text_file(out / "confusion.csv", confusion_csv(scored.report, classes), guard);
        for (const auto& [path, content] : roc_files) write_text_file(path, content, guard);

        std::cout << text;
        return 0;
    } catch (...) {
        guard.discard_all();
        throw;
    }
}

// ---- export-dot ----------------------------------------------------------------

struct ExportDotArgs {
    std::string model_file;
    std::string out_file;
    int tree_index = -1;
};

int cmd_export_dot(const ExportDotArgs& args) {
    OutputGuard guard;
    try {
        const AnyModel model = load_model_file(args.model_file);
        std::string dot;
        if (std::holds_alternative<TreeModel>(model)) {
            dot = export_dot(std::get<TreeModel>(model));
        } else {
            const auto& forest = std::get<ForestModel>(model);
            if (args.tree_index < 0)
                throw Error("model is a forest; pick one tree with --tree <index>");
            if (args.tree_index >= static_cast<int>(forest.trees.size()))
                throw Error("--tree " + std::to_string(args.tree_index) +
                            " out of range (forest has " + std::to_string(forest.trees.size()) +
                            " trees)");
            dot = export_dot(forest.trees[static_cast<std::size_t>(args.tree_index)]);
        }
        write_text_file(args.out_file, dot, guard);
        std::cout << "wrote " << args.out_file << "\n";
        return 0;
    } catch (...) {
        guard.discard_all();
        throw;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"percussion stroke classification with tree classifiers"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "render a labeled synthetic stroke corpus");
    synth_cmd->add_option("--out", synth.out_dir, "output corpus directory")->required();
    synth_cmd->add_option("--spec", synth.spec_file,
                          "stroke bank file (default: built-in 13-class bank)")
        ->check(CLI::ExistingFile);
    synth_cmd->add_option("--per-class", synth.per_class, "clips per class")
        ->capture_default_str();
    synth_cmd->add_option("--rate", synth.rate, "sample rate in Hz")->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "corpus seed")->capture_default_str();

    ExtractArgs extract;
    auto* extract_cmd =
        app.add_subcommand("extract", "extract a feature table from a corpus directory");
    extract_cmd->add_option("--in", extract.in_dir, "corpus directory (one subdir per class)")
        ->required();
    extract_cmd->add_option("--out", extract.out_csv, "output feature CSV")->required();
    extract_cmd->add_option("--rate", extract.rate, "expected sample rate in Hz")
        ->capture_default_str();
    extract_cmd->add_option("--duration", extract.duration, "fixed clip duration in seconds")
        ->capture_default_str();
    extract_cmd->add_option("--frame", extract.cfg.frame_len, "analysis frame length in samples")
        ->capture_default_str();
    extract_cmd->add_option("--hop", extract.cfg.hop, "hop size in samples")
        ->capture_default_str();
    extract_cmd->add_option("--rolloff", extract.cfg.rolloff_fraction, "roll-off fraction")
        ->capture_default_str();
    extract_cmd->add_option("--mels", extract.cfg.n_mels, "mel filter count")
        ->capture_default_str();
    extract_cmd->add_option("--mfcc", extract.cfg.n_mfcc, "MFCC count")->capture_default_str();
    extract_cmd->add_option("--chroma-ref", extract.cfg.chroma_ref_hz,
                            "chroma tuning reference in Hz")
        ->capture_default_str();
    extract_cmd
        ->add_option("--texture-frames", extract.cfg.texture_frames,
                     "frames per texture window (1 = whole clip)")
        ->capture_default_str();

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "train a classifier on a feature CSV");
    train_cmd->add_option("--csv", train.csv, "feature CSV")->required();
    train_cmd->add_option("--algo", train.algo, "cart | id3 | forest")->required();
    train_cmd->add_option("--model-out", train.model_out, "model output path")->required();
    train_cmd->add_option("--criterion", train.criterion, "cart split criterion: gini | entropy")
        ->capture_default_str();
    train_cmd->add_option("--max-depth", train.max_depth, "depth limit (-1 = unlimited)")
        ->capture_default_str();
    train_cmd->add_option("--min-leaf", train.min_leaf, "minimum rows per leaf")
        ->capture_default_str();
    train_cmd->add_option("--min-gain", train.min_gain, "minimum split gain")
        ->capture_default_str();
    train_cmd->add_option("--bins", train.bins, "ID3 discretization bins")->capture_default_str();
    train_cmd->add_option("--trees", train.trees, "forest size")->capture_default_str();
    train_cmd->add_option("--mtry", train.mtry, "features sampled per node (0 = sqrt)")
        ->capture_default_str();
    train_cmd->add_option("--seed", train.seed, "learner seed")->capture_default_str();
    train_cmd->add_option("--split-seed", train.split_seed, "train/test split seed")
        ->capture_default_str();
    train_cmd->add_option("--train-fraction", train.train_fraction, "training fraction")
        ->capture_default_str();
    train_cmd->add_option("--test-csv", train.test_csv,
                          "pre-split test CSV (then --csv is the training set)");
    train_cmd->add_option("--train-out", train.train_out, "write the training split here");
    train_cmd->add_option("--test-out", train.test_out, "write the test split here");

    EvaluateArgs evaluate;
    auto* eval_cmd =
        app.add_subcommand("evaluate", "evaluate a model on a feature CSV and write reports");
    eval_cmd->add_option("--model", evaluate.model_file, "model file")->required();
    eval_cmd->add_option("--csv", evaluate.csv, "feature CSV to score")->required();
    eval_cmd->add_option("--out", evaluate.out_dir, "report output directory")->required();
    eval_cmd->add_option("--pair", evaluate.pair,
                         "two comma-separated labels to highlight as the overlapping pair");

    ExportDotArgs export_dot_args;
    auto* dot_cmd = app.add_subcommand("export-dot", "write a trained tree as Graphviz DOT");
    dot_cmd->add_option("--model", export_dot_args.model_file, "model file")->required();
    dot_cmd->add_option("--out", export_dot_args.out_file, "DOT output path")->required();
    dot_cmd->add_option("--tree", export_dot_args.tree_index,
                        "tree index when the model is a forest");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth_cmd) return cmd_synth(synth);
        if (*extract_cmd) return cmd_extract(extract);
        if (*train_cmd) return cmd_train(train);
        if (*eval_cmd) return cmd_evaluate(evaluate);
        if (*dot_cmd) return cmd_export_dot(export_dot_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
