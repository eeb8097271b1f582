#include "botdetect/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

#include "botdetect/errors.hpp"
#include "botdetect/text.hpp"
#include "botdetect/topic_model.hpp"

namespace botdetect {

namespace {

constexpr std::string_view kMagic = "botdetect-gbdt v1";
constexpr double kMinHessian = 1e-12;
constexpr double kMinGain = 1e-12;

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// -[y log p + (1 - y) log(1 - p)] with p = sigmoid(z), computed stably.
double logistic_loss(double z, bool y) {
    const double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
    return softplus - (y ? z : 0.0);
}

class TreeBuilder {
public:
    TreeBuilder(const std::vector<std::vector<double>>& cols, const std::vector<std::vector<std::size_t>>& order,
                const std::vector<double>& grad, const std::vector<double>& hess, const std::vector<double>& raw,
                const std::vector<bool>& y, const GbdtParams& params)
        : cols_(cols), order_(order), grad_(grad), hess_(hess), raw_(raw), y_(y), params_(params),
          owner_(grad.size(), -1) {}

    RegressionTree build(const std::vector<std::size_t>& rows) {
        tree_.nodes.clear();
        for (auto r : rows) owner_[r] = 0;
        tree_.nodes.emplace_back();
        grow(0, rows, 0);
        for (auto r : rows) owner_[r] = -1;
        return std::move(tree_);
    }

private:
    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double gain = kMinGain;
    };

    void grow(int node, const std::vector<std::size_t>& rows, std::size_t depth) {
        Split best;
        if (depth < params_.max_depth && rows.size() >= 2 * params_.min_leaf) best = find_split(node, rows);
        if (best.feature < 0) {
            tree_.nodes[static_cast<std::size_t>(node)].value = leaf_value(rows);
            return;
        }
        std::vector<std::size_t> left, right;
        const auto& col = cols_[static_cast<std::size_t>(best.feature)];
        for (auto r : rows) (col[r] <= best.threshold ? left : right).push_back(r);

        const int l = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        const int rnode = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        auto& n = tree_.nodes[static_cast<std::size_t>(node)];
        n.feature = best.feature;
        n.threshold = best.threshold;
        n.left = l;
        n.right = rnode;
        for (auto r : left) owner_[r] = l;
        for (auto r : right) owner_[r] = rnode;
        grow(l, left, depth + 1);
        grow(rnode, right, depth + 1);
    }

    Split find_split(int node, const std::vector<std::size_t>& rows) const {
        double total = 0.0;
        for (auto r : rows) total += grad_[r];
        const double n = static_cast<double>(rows.size());
        const double parent = total * total / n;

        Split best;
        for (std::size_t j = 0; j < cols_.size(); ++j) {
            const auto& col = cols_[j];
            double left_sum = 0.0;
            std::size_t left_n = 0;
            double prev = 0.0;
            bool have_prev = false;
            for (auto r : order_[j]) {
                if (owner_[r] != node) continue;
                const double v = col[r];
                if (have_prev && v > prev && left_n >= params_.min_leaf && rows.size() - left_n >= params_.min_leaf) {
                    const double ln = static_cast<double>(left_n);
                    const double rs = total - left_sum;
                    const double gain = left_sum * left_sum / ln + rs * rs / (n - ln) - parent;
                    if (gain > best.gain) {
                        double mid = prev + (v - prev) / 2.0;
                        if (!(mid < v)) mid = prev;
                        best = Split{static_cast<int>(j), mid, gain};
                    }
                }
                left_sum += grad_[r];
                ++left_n;
                prev = v;
                have_prev = true;
            }
        }
        return best;
    }

    // Stored output s such that learning_rate * s is the leaf's step.
    double leaf_value(const std::vector<std::size_t>& rows) const {
        double g = 0.0, h = 0.0;
        for (auto r : rows) {
            g += grad_[r];
            h += hess_[r];
        }
        double step = params_.learning_rate * g / std::max(h, kMinHessian);
        auto loss = [&](double s) {
            double l = 0.0;
            for (auto r : rows) l += logistic_loss(raw_[r] + s, y_[r]);
            return l;
        };
        const double base = loss(0.0);
        for (int i = 0; i < 64 && step != 0.0; ++i) {
            if (loss(step) <= base) return step / params_.learning_rate;
            step /= 2.0;
        }
        return 0.0;
    }

    const std::vector<std::vector<double>>& cols_;
    const std::vector<std::vector<std::size_t>>& order_;
    const std::vector<double>& grad_;
    const std::vector<double>& hess_;
    const std::vector<double>& raw_;
    const std::vector<bool>& y_;
    const GbdtParams& params_;
    std::vector<int> owner_;
    RegressionTree tree_;
};

void write_tree(std::ostream& out, const RegressionTree& t, std::size_t node) {
    const auto& n = t.nodes[node];
    if (n.is_leaf()) {
        out << "L " << text::format_double(n.value) << '\n';
        return;
    }
    out << "S " << n.feature << ' ' << text::format_double(n.threshold) << '\n';
    write_tree(out, t, static_cast<std::size_t>(n.left));
    write_tree(out, t, static_cast<std::size_t>(n.right));
}

// Fills node `idx`; children are allocated in pairs, matching the layout
// the builder produces.
void read_tree(std::istream& in, RegressionTree& t, std::size_t idx, std::size_t& budget, std::size_t dim) {
    std::string line;
    if (budget == 0 || !std::getline(in, line)) throw FormatError("gbdt model: tree truncated");
    --budget;
    const auto parts = text::split_whitespace(line);
    if (parts.size() == 2 && parts[0] == "L") {
        const auto v = text::parse_double(parts[1]);
        if (!v) throw FormatError("gbdt model: bad leaf value");
        t.nodes[idx].value = *v;
        return;
    }
    if (parts.size() != 3 || parts[0] != "S") throw FormatError("gbdt model: bad node line '" + line + "'");
    const auto f = text::parse_uint(parts[1]);
    const auto thr = text::parse_double(parts[2]);
    if (!f || !thr || *f >= dim) throw FormatError("gbdt model: bad split node");
    const auto l = t.nodes.size();
    t.nodes.resize(l + 2);
    auto& n = t.nodes[idx];
    n.feature = static_cast<int>(*f);
    n.threshold = *thr;
    n.left = static_cast<int>(l);
    n.right = static_cast<int>(l + 1);
    read_tree(in, t, l, budget, dim);
    read_tree(in, t, l + 1, budget, dim);
}

}  // namespace

void GbdtParams::validate() const {
    if (max_depth < 1) throw InvalidConfig("gbdt max_depth must be >= 1");
    if (!(learning_rate > 0.0)) throw InvalidConfig("gbdt learning_rate must be > 0");
    if (min_leaf < 1) throw InvalidConfig("gbdt min_leaf must be >= 1");
    if (!(subsample > 0.0 && subsample <= 1.0)) throw InvalidConfig("gbdt subsample must be in (0, 1]");
}

double RegressionTree::predict(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const auto& n = nodes[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[i].value;
}

std::size_t RegressionTree::depth() const {
    std::vector<std::size_t> d(nodes.size(), 0);
    std::size_t best = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        best = std::max(best, d[i]);
        if (!nodes[i].is_leaf()) {
            d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
        }
    }
    return best;
}

double GbdtModel::decision_function(std::span<const double> x) const {
    if (x.size() != feature_names.size()) {
        throw DimensionMismatch("model expects " + std::to_string(feature_names.size()) + " features, got " +
                                std::to_string(x.size()));
    }
    double z = base_score;
    for (const auto& t : trees) z += params.learning_rate * t.predict(x);
    return z;
}

double GbdtModel::predict_proba(std::span<const double> x) const { return sigmoid(decision_function(x)); }

GbdtModel train_gbdt(const LabeledDataset& train, const GbdtParams& params, std::vector<double>* loss_trace) {
    params.validate();
    const std::size_t n = train.rows.size();
    if (n == 0) throw EmptyDataset("cannot train on an empty dataset");
    const std::size_t robots = train.robots();
    if (robots == 0 || robots == n) throw SingleClassInput("training data must contain both robots and humans");
    const std::size_t dim = train.dim();
    for (const auto& r : train.rows) {
        if (r.x.size() != dim) throw DimensionMismatch("row width differs from the feature list");
    }

    GbdtModel model;
    model.feature_names = train.feature_names;
    model.params = params;
    const double prior = static_cast<double>(robots) / static_cast<double>(n);
    model.base_score = std::log(prior / (1.0 - prior));

    std::vector<std::vector<double>> cols(dim, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dim; ++j) cols[j][i] = train.rows[i].x[j];
    }
    std::vector<std::vector<std::size_t>> order(dim, std::vector<std::size_t>(n));
    for (std::size_t j = 0; j < dim; ++j) {
        std::iota(order[j].begin(), order[j].end(), std::size_t{0});
        std::stable_sort(order[j].begin(), order[j].end(),
                         [&](std::size_t a, std::size_t b) { return cols[j][a] < cols[j][b]; });
    }

    const auto y = train.labels();
    std::vector<double> raw(n, model.base_score), grad(n), hess(n);
    auto mean_loss = [&] {
        double l = 0.0;
        for (std::size_t i = 0; i < n; ++i) l += logistic_loss(raw[i], y[i]);
        return l / static_cast<double>(n);
    };
    if (loss_trace) loss_trace->assign(1, mean_loss());

    std::mt19937_64 rng(params.seed);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto sample_size = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(params.subsample * static_cast<double>(n))));

    model.trees.reserve(params.n_trees);
    for (std::size_t t = 0; t < params.n_trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(raw[i]);
            grad[i] = (y[i] ? 1.0 : 0.0) - p;
            hess[i] = p * (1.0 - p);
        }
        std::vector<std::size_t> rows = all;
        if (sample_size < n) {
            for (std::size_t i = 0; i < sample_size; ++i) {
                const auto j = i + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n - i));
                std::swap(rows[i], rows[std::min(j, n - 1)]);
            }
            rows.resize(sample_size);
            std::sort(rows.begin(), rows.end());
        }
        TreeBuilder builder(cols, order, grad, hess, raw, y, params);
        RegressionTree tree = builder.build(rows);
        for (std::size_t i = 0; i < n; ++i) raw[i] += params.learning_rate * tree.predict(train.rows[i].x);
        model.trees.push_back(std::move(tree));
        if (loss_trace) loss_trace->push_back(mean_loss());
    }
    return model;
}

double log_loss(const GbdtModel& model, const LabeledDataset& ds) {
    if (ds.rows.empty()) return 0.0;
    double l = 0.0;
    for (const auto& r : ds.rows) l += logistic_loss(model.decision_function(r.x), r.robot);
    return l / static_cast<double>(ds.rows.size());
}

void GbdtModel::save(std::ostream& out) const {
    out << kMagic << '\n';
    out << "features=" << feature_names.size() << '\n';
    for (std::size_t i = 0; i < feature_names.size(); ++i) out << (i ? "\t" : "") << feature_names[i];
    out << '\n';
    out << "base_score=" << text::format_double(base_score) << " learning_rate=" << text::format_double(params.learning_rate)
        << " n_trees=" << trees.size() << " max_depth=" << params.max_depth << " min_leaf=" << params.min_leaf
        << " subsample=" << text::format_double(params.subsample) << " seed=" << params.seed << '\n';
    for (std::size_t t = 0; t < trees.size(); ++t) {
        out << "tree " << t << ' ' << trees[t].nodes.size() << '\n';
        write_tree(out, trees[t], 0);
    }
    out << "end\n";
}

GbdtModel GbdtModel::load(std::istream& in) {
    std::string line;
    auto next = [&](const char* what) -> std::string& {
        if (!std::getline(in, line)) throw FormatError(std::string("gbdt model truncated before ") + what);
        return line;
    };
    if (next("magic") != kMagic) throw FormatError("not a gbdt model (bad magic line)");
    GbdtModel m;
    const auto& fl = next("feature count");
    const auto count = text::starts_with(fl, "features=") ? text::parse_uint(std::string_view(fl).substr(9)) : std::nullopt;
    if (!count) throw FormatError("gbdt model: bad features line");
    const auto& names = next("feature names");
    if (*count > 0) {
        for (auto n : text::split(names, '\t')) m.feature_names.emplace_back(n);
    }
    if (m.feature_names.size() != *count) throw FormatError("gbdt model: feature name count mismatch");

    std::size_t n_trees = 0;
    for (auto kv : text::split_whitespace(next("parameters"))) {
        const auto eq = kv.find('=');
        if (eq == std::string_view::npos) throw FormatError("gbdt model: bad parameter field");
        const auto key = kv.substr(0, eq), val = kv.substr(eq + 1);
        const auto d = text::parse_double(val);
        const auto u = text::parse_uint(val);
        if (key == "base_score" && d) m.base_score = *d;
        else if (key == "learning_rate" && d) m.params.learning_rate = *d;
        else if (key == "n_trees" && u) n_trees = *u;
        else if (key == "max_depth" && u) m.params.max_depth = *u;
        else if (key == "min_leaf" && u) m.params.min_leaf = *u;
        else if (key == "subsample" && d) m.params.subsample = *d;
        else if (key == "seed" && u) m.params.seed = *u;
        else throw FormatError("gbdt model: bad parameter field '" + std::string(kv) + "'");
    }
    m.params.n_trees = n_trees;
    for (std::size_t t = 0; t < n_trees; ++t) {
        const auto parts = text::split_whitespace(next("tree header"));
        const auto nodes = parts.size() == 3 && parts[0] == "tree" ? text::parse_uint(parts[2]) : std::nullopt;
        if (!nodes) throw FormatError("gbdt model: bad tree header");
        RegressionTree tree;
        std::size_t budget = *nodes;
        tree.nodes.emplace_back();
        read_tree(in, tree, 0, budget, m.feature_names.size());
        if (budget != 0) throw FormatError("gbdt model: tree node count mismatch");
        m.trees.push_back(std::move(tree));
    }
    if (next("end") != "end") throw FormatError("gbdt model: expected 'end'");
    return m;
}

}  // namespace botdetect
