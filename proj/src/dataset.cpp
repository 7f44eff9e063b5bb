#include "oscombine/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <string>

#include "oscombine/rng.hpp"

namespace osc {
namespace {

bool parse_number(const std::string& token, double& out) {
    const char* begin = token.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t') ++end;
    return *end == '\0' && std::isfinite(out);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        std::string field = line.substr(start, comma - start);
        const auto b = field.find_first_not_of(" \t\r");
        if (b == std::string::npos)
            field.clear();
        else
            field = field.substr(b, field.find_last_not_of(" \t\r") - b + 1);
        fields.push_back(std::move(field));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

} // namespace

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open dataset file " + path.string());

    std::vector<std::vector<double>> rows;
    std::vector<long> raw_labels;
    std::string line;
    std::size_t lineno = 0;
    int dims = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() < 2)
            throw ParseError("need at least one feature and a label", lineno);
        if (dims < 0)
            dims = static_cast<int>(fields.size()) - 1;
        else if (static_cast<int>(fields.size()) - 1 != dims)
            throw ParseError("inconsistent column count", lineno);

        std::vector<double> row(dims);
        for (int c = 0; c < dims; ++c)
            if (!parse_number(fields[c], row[c]))
                throw ParseError("non-numeric feature '" + fields[c] + "'", lineno);
        double label_value = 0.0;
        if (!parse_number(fields[dims], label_value))
            throw ParseError("non-numeric label '" + fields[dims] + "'", lineno);
        if (std::floor(label_value) != label_value || std::fabs(label_value) > 1e9)
            throw ParseError("label must be an integer", lineno);
        rows.push_back(std::move(row));
        raw_labels.push_back(static_cast<long>(label_value));
    }
    if (rows.empty()) throw InvalidInputError("dataset file " + path.string() + " is empty");

    // Contiguous label remap in sorted label order.
    std::map<long, int> label_map;
    for (const long l : raw_labels) label_map.emplace(l, 0);
    int next = 0;
    for (auto& [raw, mapped] : label_map) mapped = next++;
    if (label_map.size() < 2) throw InvalidInputError("dataset has a single class");

    Dataset ds;
    ds.dims = dims;
    ds.n_classes = static_cast<int>(label_map.size());
    ds.features.resize(rows.size() * static_cast<std::size_t>(dims));
    ds.labels.resize(rows.size());
    for (std::size_t p = 0; p < rows.size(); ++p) {
        std::copy(rows[p].begin(), rows[p].end(),
                  ds.features.begin() + static_cast<std::ptrdiff_t>(p * dims));
        ds.labels[p] = label_map.at(raw_labels[p]);
    }

    // Column-wise standardization over the full file; constant columns stay 0.
    const double n = static_cast<double>(ds.patterns());
    for (int c = 0; c < dims; ++c) {
        double sum = 0.0, sum2 = 0.0;
        for (int p = 0; p < ds.patterns(); ++p) sum += ds.features[p * dims + c];
        const double mean = sum / n;
        for (int p = 0; p < ds.patterns(); ++p) {
            const double d = ds.features[p * dims + c] - mean;
            sum2 += d * d;
        }
        const double sd = std::sqrt(sum2 / n);
        const double scale = sd > 0.0 ? 1.0 / sd : 1.0;
        for (int p = 0; p < ds.patterns(); ++p) {
            double& v = ds.features[p * dims + c];
            v = (v - mean) * scale;
        }
    }
    return ds;
}

namespace {

Dataset take_rows(const Dataset& ds, std::span<const int> indices) {
    Dataset out;
    out.dims = ds.dims;
    out.n_classes = ds.n_classes;
    out.features.resize(indices.size() * static_cast<std::size_t>(ds.dims));
    out.labels.resize(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const auto row = ds.row(indices[i]);
        std::copy(row.begin(), row.end(),
                  out.features.begin() + static_cast<std::ptrdiff_t>(i * ds.dims));
        out.labels[i] = ds.labels[indices[i]];
    }
    return out;
}

} // namespace

Split split(const Dataset& dataset, const SplitSpec& spec) {
    if (!(spec.train_frac > 0.0) || !(spec.val_frac > 0.0) || !(spec.test_frac > 0.0))
        throw InvalidInputError("split fractions must be positive");
    if (std::fabs(spec.train_frac + spec.val_frac + spec.test_frac - 1.0) > 1e-9)
        throw InvalidInputError("split fractions must sum to 1");

    const int P = dataset.patterns();
    const int n_val = static_cast<int>(std::floor(P * spec.val_frac));
    const int n_test = static_cast<int>(std::floor(P * spec.test_frac));
    const int n_train = P - n_val - n_test;
    if (n_train < 1 || n_val < 1 || n_test < 1)
        throw InvalidInputError("dataset too small: a split partition would be empty");

    std::vector<int> order(P);
    std::iota(order.begin(), order.end(), 0);
    RandomStream rng(spec.seed);
    rng.shuffle(order);

    Split out;
    out.train = take_rows(dataset, std::span(order).subspan(0, n_train));
    out.validation = take_rows(dataset, std::span(order).subspan(n_train, n_val));
    out.test = take_rows(dataset, std::span(order).subspan(n_train + n_val, n_test));
    return out;
}

} // namespace osc
