#include "botdetect/metrics.hpp"

#include <cmath>

#include "botdetect/errors.hpp"

namespace botdetect {

namespace {

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

Metrics metrics_from_confusion(const Confusion& c) {
    Metrics m;
    m.confusion = c;
    const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
    const double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
    m.precision = ratio(tp, tp + fp);
    m.recall = ratio(tp, tp + fn);
    m.specificity = ratio(tn, tn + fp);
    m.f_measure = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    m.balanced_accuracy = 0.5 * (m.recall + m.specificity);
    m.g_mean = std::sqrt(m.recall * m.specificity);
    return m;
}

Metrics evaluate(const std::vector<bool>& predicted, const std::vector<bool>& truth) {
    if (predicted.size() != truth.size()) throw LengthMismatch("predictions and truth differ in length");
    if (predicted.empty()) throw LengthMismatch("cannot evaluate zero predictions");
    Confusion c;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (truth[i]) {
            predicted[i] ? ++c.tp : ++c.fn;
        } else {
            predicted[i] ? ++c.fp : ++c.tn;
        }
    }
    return metrics_from_confusion(c);
}

}  // namespace botdetect
