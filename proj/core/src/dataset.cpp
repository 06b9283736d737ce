#include "stroketree/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "stroketree/error.hpp"
#include "stroketree/rng.hpp"

namespace stroketree {

namespace {

std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        throw Error("write_csv: cannot format value");
    return std::string(buf, p);
}

double parse_double(const std::string& cell, std::size_t row, std::size_t col) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last)
        throw Error("read_csv: non-numeric feature cell '" + cell + "' at row " +
                    std::to_string(row) + ", column " + std::to_string(col));
    return v;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

void check_name(const std::string& s, const char* what) {
    if (s.empty() || s.find(',') != std::string::npos || s.find('\n') != std::string::npos)
        throw Error(std::string("write_csv: ") + what + " '" + s +
                    "' is empty or contains a delimiter");
}

} // namespace

int Dataset::class_index(const std::string& label) const {
    for (std::size_t i = 0; i < class_names.size(); ++i)
        if (class_names[i] == label) return static_cast<int>(i);
    return -1;
}

Dataset make_dataset(std::vector<FeatureVector> rows) {
    Dataset ds;
    if (rows.empty())
        throw Error("make_dataset: no rows");
    ds.feature_names = rows.front().names;
    for (const auto& row : rows) {
        if (row.values.size() != ds.feature_names.size())
            throw Error("make_dataset: inconsistent row widths");
        if (ds.class_index(row.label) < 0) ds.class_names.push_back(row.label);
    }
    ds.rows = std::move(rows);
    return ds;
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
    if (ds.feature_names.empty())
        throw Error("write_csv: dataset has no features");
    for (const auto& n : ds.feature_names) check_name(n, "feature name");
    for (const auto& n : ds.class_names) check_name(n, "label");

    std::ostringstream out;
    for (const auto& n : ds.feature_names) out << n << ',';
    out << "label\n";
    for (const auto& row : ds.rows) {
        if (row.values.size() != ds.feature_names.size())
            throw Error("write_csv: row width does not match feature_names");
        for (double v : row.values) out << format_double(v) << ',';
        out << row.label << '\n';
    }

    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("write_csv: cannot open for writing: " + path.string());
    const std::string text = out.str();
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f)
        throw Error("write_csv: write failed: " + path.string());
}

Dataset read_csv(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error("read_csv: no such file: " + path.string());

    std::string line;
    if (!std::getline(f, line))
        throw Error("read_csv: empty file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header = split_line(line);
    if (header.size() < 2 || header.back() != "label")
        throw Error("read_csv: missing label column (last header cell must be 'label'): " +
                    path.string());

    Dataset ds;
    ds.feature_names.assign(header.begin(), header.end() - 1);
    const std::size_t width = header.size();

    std::size_t row_no = 1;
    while (std::getline(f, line)) {
        ++row_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells = split_line(line);
        if (cells.size() != width)
            throw Error("read_csv: ragged row " + std::to_string(row_no) + " has " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(width));
        FeatureVector fv;
        fv.names = ds.feature_names;
        fv.values.reserve(width - 1);
        for (std::size_t c = 0; c + 1 < width; ++c)
            fv.values.push_back(parse_double(cells[c], row_no, c + 1));
        fv.label = cells.back();
        if (ds.class_index(fv.label) < 0) ds.class_names.push_back(fv.label);
        ds.rows.push_back(std::move(fv));
    }
    if (ds.rows.empty())
        throw Error("read_csv: no data rows: " + path.string());
    return ds;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double train_fraction,
                                             std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error("train_test_split: train_fraction must be in (0, 1)");
    if (ds.rows.size() < 2)
        throw Error("train_test_split: need at least 2 rows");

    std::vector<std::vector<std::size_t>> by_class(ds.class_names.size());
    for (std::size_t i = 0; i < ds.rows.size(); ++i)
        by_class[ds.class_index(ds.rows[i].label)].push_back(i);

    std::vector<bool> in_train(ds.rows.size(), false);
    Rng rng(seed);
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& idx = by_class[c];
        if (idx.size() < 2)
            throw Error("train_test_split: class '" + ds.class_names[c] + "' has " +
                        std::to_string(idx.size()) + " row(s); need at least 2 to stratify");
        rng.shuffle(idx);
        const auto n_train = static_cast<std::size_t>(
            std::ceil(train_fraction * static_cast<double>(idx.size())));
        for (std::size_t i = 0; i < n_train; ++i) in_train[idx[i]] = true;
    }

    Dataset train, test;
    train.class_names = test.class_names = ds.class_names;
    train.feature_names = test.feature_names = ds.feature_names;
    for (std::size_t i = 0; i < ds.rows.size(); ++i)
        (in_train[i] ? train : test).rows.push_back(ds.rows[i]);
    return {std::move(train), std::move(test)};
}

} // namespace stroketree
