#include "botdetect/logistic.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "botdetect/errors.hpp"
#include "botdetect/text.hpp"

namespace botdetect {

namespace {

constexpr std::string_view kMagic = "botdetect-logreg v1";

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// Solves A x = b in place by Gaussian elimination with partial pivoting.
std::vector<double> solve(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
        }
        if (piv != c) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
            std::swap(b[c], b[piv]);
        }
        const double d = a[c * n + c];
        if (std::abs(d) < 1e-300) continue;
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / d;
            if (f == 0.0) continue;
            for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t c = n; c-- > 0;) {
        double s = b[c];
        for (std::size_t k = c + 1; k < n; ++k) s -= a[c * n + k] * x[k];
        const double d = a[c * n + c];
        x[c] = std::abs(d) < 1e-300 ? 0.0 : s / d;
    }
    return x;
}

}  // namespace

double LogisticModel::decision_function(std::span<const double> x) const {
    if (x.size() != weights.size()) throw DimensionMismatch("logistic model feature count mismatch");
    double z = bias;
    for (std::size_t j = 0; j < x.size(); ++j) z += weights[j] * (x[j] - mean[j]) / scale[j];
    return z;
}

double LogisticModel::predict_proba(std::span<const double> x) const { return sigmoid(decision_function(x)); }

LogisticModel train_logistic(const LabeledDataset& train, const LogisticParams& params) {
    const std::size_t n = train.rows.size();
    if (n == 0) throw EmptyDataset("cannot train on an empty dataset");
    const std::size_t robots = train.robots();
    if (robots == 0 || robots == n) throw SingleClassInput("training data must contain both robots and humans");
    const std::size_t d = train.dim();

    LogisticModel m;
    m.feature_names = train.feature_names;
    m.params = params;
    m.mean.assign(d, 0.0);
    m.scale.assign(d, 1.0);
    for (const auto& r : train.rows) {
        for (std::size_t j = 0; j < d; ++j) m.mean[j] += r.x[j] / static_cast<double>(n);
    }
    for (std::size_t j = 0; j < d; ++j) {
        double ss = 0.0;
        for (const auto& r : train.rows) ss += (r.x[j] - m.mean[j]) * (r.x[j] - m.mean[j]);
        const double sd = std::sqrt(ss / static_cast<double>(n));
        m.scale[j] = sd > 0.0 ? sd : 1.0;
    }

    // Parameter vector: d weights then the bias. The bias is not penalized.
    const std::size_t p = d + 1;
    std::vector<double> w(p, 0.0);
    std::vector<double> z(p);
    for (std::size_t it = 0; it < params.max_iterations; ++it) {
        std::vector<double> grad(p, 0.0), hess(p * p, 0.0);
        for (const auto& r : train.rows) {
            for (std::size_t j = 0; j < d; ++j) z[j] = (r.x[j] - m.mean[j]) / m.scale[j];
            z[d] = 1.0;
            double s = 0.0;
            for (std::size_t j = 0; j < p; ++j) s += w[j] * z[j];
            const double prob = sigmoid(s);
            const double err = prob - (r.robot ? 1.0 : 0.0);
            const double h = prob * (1.0 - prob);
            for (std::size_t a = 0; a < p; ++a) {
                grad[a] += err * z[a];
                for (std::size_t b = 0; b < p; ++b) hess[a * p + b] += h * z[a] * z[b];
            }
        }
        for (std::size_t j = 0; j < d; ++j) {
            grad[j] += params.l2 * static_cast<double>(n) * w[j];
            hess[j * p + j] += params.l2 * static_cast<double>(n);
        }
        hess[d * p + d] += 1e-9;
        const auto step = solve(hess, grad);
        double norm = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            w[j] -= step[j];
            norm += step[j] * step[j];
        }
        if (norm < params.tolerance) break;
    }
    m.weights.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(d));
    m.bias = w[d];
    return m;
}

void LogisticModel::save(std::ostream& out) const {
    out << kMagic << '\n';
    out << "features=" << feature_names.size() << " l2=" << text::format_double(params.l2)
        << " max_iterations=" << params.max_iterations << '\n';
    for (std::size_t j = 0; j < feature_names.size(); ++j) {
        out << feature_names[j] << '\t' << text::format_double(mean[j]) << '\t' << text::format_double(scale[j]) << '\t'
            << text::format_double(weights[j]) << '\n';
    }
    out << "bias=" << text::format_double(bias) << '\n' << "end\n";
}

LogisticModel LogisticModel::load(std::istream& in) {
    std::string line;
    auto next = [&](const char* what) -> std::string& {
        if (!std::getline(in, line)) throw FormatError(std::string("logistic model truncated before ") + what);
        return line;
    };
    if (next("magic") != kMagic) throw FormatError("not a logistic model (bad magic line)");
    LogisticModel m;
    std::size_t count = 0;
    for (auto kv : text::split_whitespace(next("header"))) {
        const auto eq = kv.find('=');
        const auto key = kv.substr(0, eq);
        const auto val = eq == std::string_view::npos ? std::string_view{} : kv.substr(eq + 1);
        if (key == "features" && text::parse_uint(val)) count = *text::parse_uint(val);
        else if (key == "l2" && text::parse_double(val)) m.params.l2 = *text::parse_double(val);
        else if (key == "max_iterations" && text::parse_uint(val)) m.params.max_iterations = *text::parse_uint(val);
        else throw FormatError("logistic model: bad header field '" + std::string(kv) + "'");
    }
    for (std::size_t j = 0; j < count; ++j) {
        const auto cols = text::split(next("feature rows"), '\t');
        if (cols.size() != 4) throw FormatError("logistic model: bad feature row");
        const auto mu = text::parse_double(cols[1]), sc = text::parse_double(cols[2]), wt = text::parse_double(cols[3]);
        if (!mu || !sc || !wt || *sc <= 0.0) throw FormatError("logistic model: bad feature row values");
        m.feature_names.emplace_back(cols[0]);
        m.mean.push_back(*mu);
        m.scale.push_back(*sc);
        m.weights.push_back(*wt);
    }
    const auto& b = next("bias");
    const auto bias = text::starts_with(b, "bias=") ? text::parse_double(std::string_view(b).substr(5)) : std::nullopt;
    if (!bias) throw FormatError("logistic model: bad bias line");
    m.bias = *bias;
    if (next("end") != "end") throw FormatError("logistic model: expected 'end'");
    return m;
}

}  // namespace botdetect
