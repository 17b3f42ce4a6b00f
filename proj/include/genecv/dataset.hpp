#pragma once
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "genecv/error.hpp"
#include "genecv/matrix.hpp"
#include "genecv/text.hpp"

namespace genecv {

// Expression matrix with per-sample class indicators. Labels are 1-based
// class indices into class_names; feature and sample indices are 0-based.
struct LabeledDataset {
    Matrix x;                               // n samples x p features
    std::vector<int> labels;                // per sample, in {1..g}
    std::vector<std::string> feature_names; // size p
    std::vector<std::string> class_names;   // size g

    int n() const { return static_cast<int>(x.rows); }
    int p() const { return static_cast<int>(x.cols); }
    int n_classes() const { return static_cast<int>(class_names.size()); }

    int class_size(int cls) const {
        return static_cast<int>(std::count(labels.begin(), labels.end(), cls));
    }

    std::vector<int> samples_of_class(int cls) const {
        std::vector<int> out;
        for (int j = 0; j < n(); ++j)
            if (labels[j] == cls) out.push_back(j);
        return out;
    }

    // Sub-dataset over the given sample rows (all features kept, so feature
    // indices stay valid across splits). Does not require every class to
    // survive; training code checks for class collapse itself.
    LabeledDataset select_samples(const std::vector<int>& idx) const {
        LabeledDataset out;
        out.x = Matrix(idx.size(), x.cols);
        out.labels.reserve(idx.size());
        for (std::size_t r = 0; r < idx.size(); ++r) {
            const auto src = x.row(static_cast<std::size_t>(idx[r]));
            std::copy(src.begin(), src.end(), out.x.row(r).begin());
            out.labels.push_back(labels[static_cast<std::size_t>(idx[r])]);
        }
        out.feature_names = feature_names;
        out.class_names = class_names;
        return out;
    }

    void validate() const {
        require(x.rows >= 2, "data", "dataset needs at least 2 samples");
        require(x.cols >= 1, "data", "dataset needs at least 1 feature");
        require(labels.size() == x.rows, "data", "label count does not match sample count");
        require(feature_names.size() == x.cols, "data", "feature name count mismatch");
        const int g = n_classes();
        require(g >= 1, "data", "dataset declares no classes");
        std::vector<int> counts(static_cast<std::size_t>(g), 0);
        for (int z : labels) {
            require(z >= 1 && z <= g, "data", "label outside {1..g}");
            ++counts[static_cast<std::size_t>(z - 1)];
        }
        for (int c = 0; c < g; ++c)
            require(counts[static_cast<std::size_t>(c)] >= 1, "data",
                    "class '" + class_names[static_cast<std::size_t>(c)] + "' has no samples");
        for (double v : x.values)
            require(std::isfinite(v), "data", "matrix contains a non-finite value");
    }
};

enum class FileLayout { rows_are_samples, rows_are_features };

namespace detail {

inline char detect_delim(const std::string& header) {
    return header.find('\t') != std::string::npos ? '\t' : ',';
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "data", "cannot open file '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    require(lines.size() >= 2, "data", "file '" + path + "' has no data rows");
    return lines;
}

inline int class_index(std::vector<std::string>& class_names, const std::string& name,
                       const std::vector<std::string>& expected) {
    if (!expected.empty()) {
        const auto it = std::find(expected.begin(), expected.end(), name);
        require(it != expected.end(), "data", "unknown class name '" + name + "'");
        return static_cast<int>(it - expected.begin()) + 1;
    }
    const auto it = std::find(class_names.begin(), class_names.end(), name);
    if (it != class_names.end()) return static_cast<int>(it - class_names.begin()) + 1;
    class_names.push_back(name);
    return static_cast<int>(class_names.size());
}

inline double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    double v = 0.0;
    if (!parse_double(cell, v))
        fail("data", "non-numeric expression cell '" + cell + "' at row " +
                         std::to_string(row + 1) + ", column " + std::to_string(col + 1));
    return v;
}

} // namespace detail

// Delimited text with a header row; delimiter (comma or tab) auto-detected.
// rows_are_samples: one sample per row, label column named "class".
// rows_are_features: transposed layout; first column holds feature names and
// the row named "class" holds the labels.
// When expected_class_names is given, any other label is rejected.
inline LabeledDataset load_dataset(const std::string& path, FileLayout layout,
                                   const std::vector<std::string>& expected_class_names = {}) {
    const auto lines = detail::read_lines(path);
    const char delim = detail::detect_delim(lines[0]);
    std::vector<std::vector<std::string>> cells;
    cells.reserve(lines.size());
    for (const auto& line : lines) cells.push_back(detail::split(line, delim));
    const std::size_t width = cells[0].size();
    for (std::size_t r = 1; r < cells.size(); ++r)
        if (cells[r].size() != width)
            fail("data", "ragged row " + std::to_string(r + 1) + ": expected " +
                             std::to_string(width) + " fields, got " +
                             std::to_string(cells[r].size()));

    LabeledDataset out;
    if (!expected_class_names.empty()) out.class_names = expected_class_names;
    std::vector<std::string> inferred;

    if (layout == FileLayout::rows_are_samples) {
        std::size_t label_col = width;
        for (std::size_t c = 0; c < width; ++c) {
            if (cells[0][c] == "class") {
                require(label_col == width, "data", "duplicate label column 'class'");
                label_col = c;
            }
        }
        require(label_col < width, "data", "missing label column 'class'");
        for (std::size_t c = 0; c < width; ++c)
            if (c != label_col) out.feature_names.push_back(cells[0][c]);

        const std::size_t n = cells.size() - 1, p = width - 1;
        out.x = Matrix(n, p);
        for (std::size_t r = 0; r < n; ++r) {
            std::size_t fc = 0;
            for (std::size_t c = 0; c < width; ++c) {
                if (c == label_col) continue;
                out.x(r, fc++) = detail::parse_cell(cells[r + 1][c], r + 1, c);
            }
            out.labels.push_back(
                detail::class_index(inferred, cells[r + 1][label_col], expected_class_names));
        }
    } else {
        std::size_t label_row = 0;
        for (std::size_t r = 1; r < cells.size(); ++r) {
            if (cells[r][0] == "class") {
                require(label_row == 0, "data", "duplicate label row 'class'");
                label_row = r;
            }
        }
        require(label_row != 0, "data", "missing label column 'class'");

        const std::size_t n = width - 1, p = cells.size() - 2;
        out.x = Matrix(n, p);
        std::size_t fr = 0;
        for (std::size_t r = 1; r < cells.size(); ++r) {
            if (r == label_row) continue;
            out.feature_names.push_back(cells[r][0]);
            for (std::size_t c = 1; c < width; ++c)
                out.x(c - 1, fr) = detail::parse_cell(cells[r][c], r, c);
            ++fr;
        }
        for (std::size_t c = 1; c < width; ++c)
            out.labels.push_back(
                detail::class_index(inferred, cells[label_row][c], expected_class_names));
    }

    if (expected_class_names.empty()) out.class_names = inferred;
    out.validate();
    return out;
}

// Writer emits the rows_are_samples layout with the label column last.
inline void save_dataset(const std::string& path, const LabeledDataset& data, char delim = '\t') {
    std::ofstream out(path);
    require(static_cast<bool>(out), "data", "cannot write file '" + path + "'");
    for (const auto& name : data.feature_names) out << name << delim;
    out << "class\n";
    for (int r = 0; r < data.n(); ++r) {
        for (int c = 0; c < data.p(); ++c)
            out << detail::fmt_double(data.x(static_cast<std::size_t>(r),
                                             static_cast<std::size_t>(c)))
                << delim;
        out << data.class_names[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(r)] - 1)]
            << "\n";
    }
    require(static_cast<bool>(out), "data", "write failed for '" + path + "'");
}

} // namespace genecv
