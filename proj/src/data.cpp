#include "ca/data.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace ca {

GmmSpec GmmSpec::desk_default(std::uint64_t seed) {
    GmmSpec spec;
    spec.seed = seed;
    spec.weights = Vector::Constant(spec.k, 1.0 / spec.k);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    spec.means.resize(spec.k, spec.d);
    for (int j = 0; j < spec.k; ++j) {
        Vector dir(spec.d);
        for (int c = 0; c < spec.d; ++c) dir[c] = gauss(rng);
        spec.means.row(j) = 6.0 * dir.transpose() / dir.norm();
    }
    return spec;
}

Vector LabeledDataset::class_frequencies() const {
    Vector f = Vector::Zero(k);
    for (int y : labels) f[y] += 1.0;
    return f / static_cast<double>(labels.size());
}

LabeledDataset gmm_generate(const GmmSpec& spec, int n) {
    if (n < 1) throw std::invalid_argument("gmm_generate: n must be >= 1");
    if (spec.stddev <= 0) throw std::invalid_argument("gmm_generate: stddev must be positive");
    std::mt19937_64 rng(spec.seed);
    std::discrete_distribution<int> component(spec.weights.data(),
                                              spec.weights.data() + spec.weights.size());
    std::normal_distribution<double> gauss(0.0, 1.0);
    LabeledDataset out;
    out.k = spec.k;
    out.features.resize(n, spec.d);
    out.labels.resize(n);
    for (int i = 0; i < n; ++i) {
        const int y = component(rng);
        out.labels[i] = y;
        for (int c = 0; c < spec.d; ++c)
            out.features(i, c) = spec.means(y, c) + spec.stddev * gauss(rng);
    }
    return out;
}

Vector imbalance_keep_probs(ImbalanceSchedule schedule, int k) {
    Vector base(10);
    switch (schedule) {
        case ImbalanceSchedule::Imb1:
            base << 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.95, 0.9, 0.85, 0.8;
            break;
        case ImbalanceSchedule::Imb2:
            base << 1.0, 0.95, 0.9, 0.85, 0.8, 0.75, 0.7, 0.65, 0.6, 0.55;
            break;
        case ImbalanceSchedule::Imb3:
            base << 1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1;
            break;
    }
    if (k == 10) return base;
    // Linear interpolation of the keep curve onto k classes.
    Vector out(k);
    for (int j = 0; j < k; ++j) {
        const double pos = (k == 1) ? 0.0 : 9.0 * j / (k - 1);
        const int lo = static_cast<int>(std::floor(pos));
        const int hi = std::min(lo + 1, 9);
        const double frac = pos - lo;
        out[j] = (1.0 - frac) * base[lo] + frac * base[hi];
    }
    return out;
}

ImbalanceResult apply_imbalance(const LabeledDataset& dataset, const Vector& keep_probs,
                                std::uint64_t seed, bool exact_quota) {
    if (keep_probs.size() != dataset.k)
        throw std::invalid_argument("apply_imbalance: schedule length mismatch");
    const int n = dataset.n();
    std::vector<char> keep(n, 0);
    if (exact_quota) {
        // Keep the first round(p * count) points of each class, in dataset order.
        std::vector<long> quota(dataset.k), seen(dataset.k, 0);
        std::vector<long> class_count(dataset.k, 0);
        for (int y : dataset.labels) ++class_count[y];
        for (int j = 0; j < dataset.k; ++j)
            quota[j] = std::lround(keep_probs[j] * class_count[j]);
        for (int i = 0; i < n; ++i)
            if (seen[dataset.labels[i]]++ < quota[dataset.labels[i]]) keep[i] = 1;
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        for (int i = 0; i < n; ++i) keep[i] = coin(rng) < keep_probs[dataset.labels[i]];
    }
    long kept = 0;
    for (char c : keep) kept += c;
    ImbalanceResult out;
    out.dataset.k = dataset.k;
    out.dataset.features.resize(kept, dataset.dim());
    out.dataset.labels.resize(kept);
    long r = 0;
    for (int i = 0; i < n; ++i) {
        if (!keep[i]) continue;
        out.dataset.features.row(r) = dataset.features.row(i);
        out.dataset.labels[r] = dataset.labels[i];
        ++r;
    }
    out.prior = Prior::from_probs(keep_probs);
    return out;
}

LabeledDataset load_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("empty CSV: " + path);
    std::vector<std::string> header;
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) header.push_back(cell);
    }
    const bool has_label = !header.empty() && header.back() == "label";
    const size_t n_feat = header.size() - (has_label ? 1 : 0);
    if (n_feat == 0) throw std::runtime_error("CSV has no feature columns: " + path);

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    int lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) {
            size_t used = 0;
            double v;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                throw std::runtime_error("non-numeric cell at line " + std::to_string(lineno));
            }
            if (used != cell.size())
                throw std::runtime_error("non-numeric cell at line " + std::to_string(lineno));
            row.push_back(v);
        }
        if (row.size() != header.size())
            throw std::runtime_error("ragged row at line " + std::to_string(lineno));
        if (has_label) {
            labels.push_back(static_cast<int>(row.back()));
            row.pop_back();
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("CSV has no data rows: " + path);

    LabeledDataset out;
    out.features.resize(rows.size(), n_feat);
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < n_feat; ++j) out.features(i, j) = rows[i][j];
    out.labels = std::move(labels);
    if (out.has_labels()) {
        int k = 0;
        for (int y : out.labels) k = std::max(k, y + 1);
        out.k = k;
    }
    return out;
}

void save_csv(const LabeledDataset& dataset, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    for (int j = 0; j < dataset.dim(); ++j) f << (j ? ",f" : "f") << j;
    if (dataset.has_labels()) f << ",label";
    f << '\n';
    char buf[64];
    for (int i = 0; i < dataset.n(); ++i) {
        for (int j = 0; j < dataset.dim(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", dataset.features(i, j));
            if (j) f << ',';
            f << buf;
        }
        if (dataset.has_labels()) f << ',' << dataset.labels[i];
        f << '\n';
    }
}

}  // namespace ca
