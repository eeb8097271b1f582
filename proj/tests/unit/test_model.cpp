#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "botdetect/errors.hpp"
#include "botdetect/feature_scores.hpp"
#include "botdetect/gbdt.hpp"
#include "botdetect/logistic.hpp"
#include "botdetect/metrics.hpp"
#include "botdetect/model.hpp"
#include "support.hpp"

using namespace botdetect;

namespace {

LabeledDataset make_ds(std::vector<std::string> names, const std::vector<std::vector<double>>& xs,
                       const std::vector<bool>& y, std::vector<std::int64_t> ts = {}) {
    LabeledDataset ds;
    ds.feature_names = std::move(names);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        Sample s;
        s.session_id = "s" + std::to_string(i);
        s.timestamp = ts.empty() ? static_cast<std::int64_t>(i) : ts[i];
        s.x = xs[i];
        s.missing.assign(xs[i].size(), false);
        s.robot = y[i];
        ds.rows.push_back(std::move(s));
    }
    return ds;
}

// Two noisy features; robots sit above the line x0 + x1 = 1.
LabeledDataset separable(std::size_t n, std::uint64_t seed) {
    testsupport::Gen g(seed);
    std::vector<std::vector<double>> xs;
    std::vector<bool> y;
    while (xs.size() < n) {
        const double a = g.real(0, 1), b = g.real(0, 1);
        if (std::abs(a + b - 1.0) < 0.05) continue;
        xs.push_back({a, b});
        y.push_back(a + b > 1.0);
    }
    return make_ds({"a", "b"}, xs, y);
}

// Overlapping classes with a time-ordered drift-free signal.
LabeledDataset noisy(std::size_t n, std::uint64_t seed) {
    testsupport::Gen g(seed);
    std::vector<std::vector<double>> xs;
    std::vector<bool> y;
    for (std::size_t i = 0; i < n; ++i) {
        const bool robot = g.coin();
        const double shift = robot ? 1.0 : 0.0;
        xs.push_back({shift + g.real(-1.2, 1.2), g.real(0, 1), shift * 0.5 + g.real(0, 1.5)});
        y.push_back(robot);
    }
    return make_ds({"f0", "f1", "f2"}, xs, y);
}

double oracle_f(const std::vector<double>& x, const std::vector<bool>& y) {
    double s[2] = {0, 0};
    double n[2] = {0, 0};
    for (std::size_t i = 0; i < x.size(); ++i) {
        s[y[i]] += x[i];
        n[y[i]] += 1;
    }
    const double grand = (s[0] + s[1]) / (n[0] + n[1]);
    const double m[2] = {s[0] / n[0], s[1] / n[1]};
    double ssb = 0, ssw = 0;
    for (int c = 0; c < 2; ++c) ssb += n[c] * (m[c] - grand) * (m[c] - grand);
    for (std::size_t i = 0; i < x.size(); ++i) ssw += (x[i] - m[y[i]]) * (x[i] - m[y[i]]);
    const double dfw = n[0] + n[1] - 2;
    return (ssb / 1.0) / (ssw / dfw);
}

double oracle_chi2(const std::vector<double>& x, const std::vector<bool>& y) {
    double obs[2] = {0, 0};
    double n[2] = {0, 0};
    for (std::size_t i = 0; i < x.size(); ++i) {
        obs[y[i]] += x[i];
        n[y[i]] += 1;
    }
    const double total = obs[0] + obs[1];
    double chi = 0;
    for (int c = 0; c < 2; ++c) {
        const double e = total * n[c] / (n[0] + n[1]);
        chi += (obs[c] - e) * (obs[c] - e) / e;
    }
    return chi;
}

}  // namespace

TEST_CASE("metrics fixtures") {
    const auto m = metrics_from_confusion({3, 1, 4, 2});
    CHECK(m.precision == doctest::Approx(0.75));
    CHECK(m.recall == doctest::Approx(0.6));
    CHECK(m.specificity == doctest::Approx(0.8));
    CHECK(m.f_measure == doctest::Approx(2.0 / 3.0));
    CHECK(m.balanced_accuracy == doctest::Approx(0.7));
    CHECK(m.g_mean == doctest::Approx(std::sqrt(0.48)));

    const std::vector<bool> truth = {true, false, true, false, true, false};
    const auto perfect = evaluate(truth, truth);
    CHECK(perfect.f_measure == 1.0);
    CHECK(perfect.balanced_accuracy == 1.0);
    CHECK(perfect.g_mean == 1.0);

    const auto all_robot = evaluate(std::vector<bool>(6, true), truth);
    CHECK(all_robot.balanced_accuracy == doctest::Approx(0.5));
    CHECK(all_robot.g_mean == 0.0);
    CHECK(all_robot.f_measure == doctest::Approx(2.0 / 3.0));

    const auto none = metrics_from_confusion({0, 0, 5, 0});
    CHECK(none.precision == 0.0);
    CHECK(none.recall == 0.0);
    CHECK(none.f_measure == 0.0);

    CHECK_THROWS_AS(evaluate({true}, {true, false}), LengthMismatch);
    CHECK_THROWS_AS(evaluate({}, {}), LengthMismatch);
}

TEST_CASE("metrics relabeling symmetry") {
    testsupport::Gen g(3);
    std::size_t f_differs = 0;
    for (int i = 0; i < 300; ++i) {
        const std::size_t n = 2 + g.below(30);
        std::vector<bool> p(n), t(n), pf(n), tf(n);
        for (std::size_t j = 0; j < n; ++j) {
            p[j] = g.coin();
            t[j] = g.coin();
            pf[j] = !p[j];
            tf[j] = !t[j];
        }
        const auto a = evaluate(p, t), b = evaluate(pf, tf);
        CHECK(a.balanced_accuracy == doctest::Approx(b.balanced_accuracy));
        CHECK(a.g_mean == doctest::Approx(b.g_mean));
        if (std::abs(a.f_measure - b.f_measure) > 1e-12) ++f_differs;
        // Independent evaluation of the confusion counts.
        Confusion c;
        for (std::size_t j = 0; j < n; ++j) {
            if (p[j] && t[j]) ++c.tp;
            if (p[j] && !t[j]) ++c.fp;
            if (!p[j] && !t[j]) ++c.tn;
            if (!p[j] && t[j]) ++c.fn;
        }
        CHECK(a.confusion == c);
        for (double v : {a.f_measure, a.balanced_accuracy, a.g_mean}) CHECK((v >= 0.0 && v <= 1.0));
    }
    CHECK(f_differs > 0);
}

TEST_CASE("ANOVA F against a brute-force oracle") {
    testsupport::Gen g(11);
    std::vector<double> x;
    std::vector<bool> y;
    for (int i = 0; i < 20; ++i) {
        const bool robot = i % 2 == 0;
        y.push_back(robot);
        x.push_back((robot ? 1.0 : 0.0) + g.real(-0.5, 0.5));
    }
    CHECK(anova_f_statistic(x, y) == doctest::Approx(oracle_f(x, y)).epsilon(1e-10));
    std::vector<double> scaled = x;
    for (auto& v : scaled) v *= 7.5;
    CHECK(anova_f_statistic(scaled, y) == doctest::Approx(anova_f_statistic(x, y)).epsilon(1e-10));

    CHECK(anova_f_statistic(std::vector<double>(20, 3.0), y) == 0.0);
    // Same multiset of values in both classes.
    std::vector<double> same;
    for (int i = 0; i < 20; ++i) same.push_back(static_cast<double>(i / 2));
    CHECK(anova_f_statistic(same, y) == doctest::Approx(0.0));
    std::vector<double> split;
    for (bool r : y) split.push_back(r ? 2.0 : 1.0);
    CHECK(std::isinf(anova_f_statistic(split, y)));

    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 4 + g.below(40);
        std::vector<double> v(n);
        std::vector<bool> lab(n);
        for (std::size_t j = 0; j < n; ++j) {
            v[j] = g.real(-3, 3);
            lab[j] = j < 2 ? j == 0 : g.coin();
        }
        CHECK(anova_f_statistic(v, lab) == doctest::Approx(oracle_f(v, lab)).epsilon(1e-9));
    }
}

TEST_CASE("chi-square scores") {
    const std::vector<bool> y = {true, true, false, false};
    CHECK(chi2_statistic(std::vector<double>{1, 2, 2, 1}, y) == doctest::Approx(0.0));
    // Proportional to the class indicator: O = (2, 0), E = (1, 1).
    CHECK(chi2_statistic(std::vector<double>{1, 1, 0, 0}, y) == doctest::Approx(2.0));
    CHECK_THROWS_AS(chi2_statistic(std::vector<double>{1, -1, 0, 0}, y), std::domain_error);

    testsupport::Gen g(2);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 4 + g.below(30);
        std::vector<double> v(n);
        std::vector<bool> lab(n);
        for (std::size_t j = 0; j < n; ++j) {
            v[j] = g.real(0.1, 5);
            lab[j] = j < 2 ? j == 0 : g.coin();
        }
        CHECK(chi2_statistic(v, lab) == doctest::Approx(oracle_chi2(v, lab)).epsilon(1e-9));
    }

    auto ds = make_ds({"indicator", "noise", "flat"}, {{1, 0.3, 1}, {1, 0.9, 1}, {0, 0.5, 1}, {0, 0.4, 1}}, y);
    const auto scores = chi2_scores(ds);
    CHECK(scores.front().name == "indicator");
    CHECK(scores.back().score == doctest::Approx(0.0));
    ds.rows[2].x[1] = -1;
    try {
        chi2_scores(ds);
        FAIL("expected NegativeFeature");
    } catch (const NegativeFeature& e) {
        CHECK(e.feature() == "noise");
    }
}

TEST_CASE("feature scores are permutation invariant and sorted") {
    auto ds = noisy(80, 4);
    const auto f1 = anova_f_scores(ds);
    const auto c1 = chi2_scores(make_ds({"f1", "f2"},
                                        [&] {
                                            std::vector<std::vector<double>> xs;
                                            for (const auto& r : ds.rows) xs.push_back({r.x[1], r.x[2]});
                                            return xs;
                                        }(),
                                        ds.labels()));
    std::reverse(ds.rows.begin(), ds.rows.end());
    std::rotate(ds.rows.begin(), ds.rows.begin() + 17, ds.rows.end());
    const auto f2 = anova_f_scores(ds);
    REQUIRE(f1.size() == f2.size());
    for (std::size_t i = 0; i < f1.size(); ++i) {
        CHECK(f1[i].name == f2[i].name);
        CHECK(f1[i].score == doctest::Approx(f2[i].score).epsilon(1e-10));
        if (i) CHECK(f1[i - 1].score >= f1[i].score);
    }
    CHECK(f1.front().name == "f0");
    CHECK(c1.size() == 2);

    auto one = make_ds({"x"}, {{1}, {2}}, {true, true});
    CHECK_THROWS_AS(anova_f_scores(one), SingleClassInput);
    CHECK_THROWS_AS(chi2_scores(one), SingleClassInput);
}

TEST_CASE("time-ordered split") {
    std::vector<std::vector<double>> xs(10, std::vector<double>{0.0});
    std::vector<bool> y(10);
    std::vector<std::int64_t> ts = {50, 10, 90, 30, 70, 20, 80, 40, 60, 100};
    for (std::size_t i = 0; i < 10; ++i) y[i] = i % 2;
    const auto ds = make_ds({"x"}, xs, y, ts);
    const auto [train, test] = time_ordered_split(ds, 0.7);
    CHECK(train.rows.size() == 7);
    CHECK(test.rows.size() == 3);
    std::int64_t max_train = 0, min_test = 1000;
    for (const auto& r : train.rows) max_train = std::max(max_train, r.timestamp);
    for (const auto& r : test.rows) min_test = std::min(min_test, r.timestamp);
    CHECK(max_train <= min_test);

    const auto tied = make_ds({"x"}, xs, y, std::vector<std::int64_t>(10, 5));
    const auto [ttrain, ttest] = time_ordered_split(tied, 0.7);
    for (std::size_t i = 0; i < 7; ++i) CHECK(ttrain.rows[i].session_id == "s" + std::to_string(i));
    for (std::size_t i = 0; i < 3; ++i) CHECK(ttest.rows[i].session_id == "s" + std::to_string(7 + i));

    const auto three = make_ds({"x"}, {{0}, {0}, {0}}, {true, false, true});
    const auto [a, b] = time_ordered_split(three, 0.5);
    CHECK(a.rows.size() == 2);
    CHECK(b.rows.size() == 1);

    CHECK_THROWS_AS(time_ordered_split(LabeledDataset{}, 0.7), EmptyDataset);
    CHECK_THROWS_AS(time_ordered_split(ds, 0.0), InvalidConfig);
    CHECK_THROWS_AS(time_ordered_split(ds, 1.0), InvalidConfig);

    testsupport::Gen g(8);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + g.below(50);
        std::vector<std::vector<double>> rx(n, std::vector<double>{0.0});
        std::vector<bool> ry(n);
        std::vector<std::int64_t> rt(n);
        for (auto& t : rt) t = g.between(0, 20);
        const auto rds = make_ds({"x"}, rx, ry, rt);
        const double frac = g.real(0.05, 0.95);
        const auto [tr, te] = time_ordered_split(rds, frac);
        CHECK(tr.rows.size() == static_cast<std::size_t>(std::ceil(frac * static_cast<double>(n))));
        CHECK(tr.rows.size() + te.rows.size() == n);
        if (!tr.rows.empty() && !te.rows.empty()) CHECK(tr.rows.back().timestamp <= te.rows.front().timestamp);
    }
}

TEST_CASE("GBDT fits a separable dataset") {
    const auto ds = separable(100, 1);
    GbdtParams p;
    p.n_trees = 50;
    p.min_leaf = 1;
    p.learning_rate = 0.3;
    std::vector<double> trace;
    const auto m = train_gbdt(ds, p, &trace);
    std::size_t correct = 0, confident = 0;
    for (const auto& r : ds.rows) {
        const double prob = m.predict_proba(r.x);
        if (m.predict(r.x) == r.robot) ++correct;
        if ((r.robot ? prob : 1.0 - prob) > 0.9) ++confident;
    }
    CHECK(correct == 100);
    CHECK(confident == 100);
    REQUIRE(trace.size() == 51);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-12);
    CHECK(log_loss(m, ds) == doctest::Approx(trace.back()));
    for (const auto& t : m.trees) CHECK(t.depth() <= p.max_depth);
}

TEST_CASE("GBDT degenerate inputs") {
    GbdtParams p;
    p.n_trees = 0;
    const auto balanced = noisy(40, 2);
    auto half = balanced;
    for (std::size_t i = 0; i < half.rows.size(); ++i) half.rows[i].robot = i % 2 == 0;
    const auto empty = train_gbdt(half, p);
    CHECK(empty.trees.empty());
    CHECK(empty.predict_proba(half.rows[0].x) == doctest::Approx(0.5));

    std::vector<std::vector<double>> xs(30, std::vector<double>{4.0});
    std::vector<bool> y(30);
    for (std::size_t i = 0; i < 30; ++i) y[i] = i < 10;
    GbdtParams q;
    q.n_trees = 20;
    q.min_leaf = 1;
    const auto flat = train_gbdt(make_ds({"c"}, xs, y), q);
    CHECK(flat.predict_proba(std::vector<double>{4.0}) == doctest::Approx(1.0 / 3.0));
    CHECK(flat.predict_proba(std::vector<double>{-100.0}) == doctest::Approx(1.0 / 3.0));
    for (const auto& t : flat.trees) CHECK(t.nodes.size() == 1);

    CHECK_THROWS_AS(train_gbdt(make_ds({"c"}, {{1}, {2}}, {true, true})), SingleClassInput);
    CHECK_THROWS_AS(train_gbdt(LabeledDataset{}), EmptyDataset);
    CHECK_THROWS_AS(empty.predict_proba(std::vector<double>{1.0}), DimensionMismatch);

    GbdtParams bad;
    bad.learning_rate = 0.0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("GBDT threshold, determinism and persistence") {
    const auto ds = noisy(200, 5);
    GbdtParams p;
    p.n_trees = 40;
    p.subsample = 0.7;
    p.seed = 9;
    std::vector<double> trace;
    const auto a = train_gbdt(ds, p, &trace), b = train_gbdt(ds, p);
    CHECK(a == b);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-12);

    std::stringstream buf;
    a.save(buf);
    const auto back = GbdtModel::load(buf);
    CHECK(back == a);
    for (const auto& r : ds.rows) {
        const double prob = a.predict_proba(r.x);
        CHECK(prob > 0.0);
        CHECK(prob < 1.0);
        CHECK(back.predict_proba(r.x) == prob);
        CHECK(a.predict(r.x) == (prob >= 0.5));
    }

    // Label flips exactly at probability 0.5: a decision value of 0.
    GbdtModel zero;
    zero.feature_names = {"x"};
    CHECK(zero.predict_proba(std::vector<double>{1.0}) == 0.5);
    CHECK(zero.predict(std::vector<double>{1.0}));
    zero.base_score = -1e-12;
    CHECK_FALSE(zero.predict(std::vector<double>{1.0}));

    std::istringstream junk("not a model\n");
    CHECK_THROWS_AS(GbdtModel::load(junk), FormatError);
}

TEST_CASE("logistic baseline and the classifier wrapper") {
    const auto ds = noisy(300, 6);
    TrainParams params;
    params.algorithm = Algorithm::Logistic;
    const auto clf = train_classifier(ds, params);
    REQUIRE(clf.logistic() != nullptr);
    CHECK(clf.algorithm() == Algorithm::Logistic);
    CHECK(evaluate_model(clf, ds).balanced_accuracy > 0.7);

    std::stringstream buf;
    clf.save(buf);
    const auto back = Classifier::load(buf);
    CHECK(back.algorithm() == Algorithm::Logistic);
    for (const auto& r : ds.rows) CHECK(back.predict_proba(r.x) == clf.predict_proba(r.x));

    TrainParams g;
    g.gbdt.n_trees = 30;
    const auto gb = train_classifier(ds, g);
    std::stringstream gbuf;
    gb.save(gbuf);
    CHECK(Classifier::load(gbuf).algorithm() == Algorithm::Gbdt);

    CHECK(parse_algorithm("gbdt") == Algorithm::Gbdt);
    CHECK(parse_algorithm("logistic") == Algorithm::Logistic);
    CHECK_THROWS_AS(parse_algorithm("svm"), InvalidConfig);

    // Scoring a wider table by feature name.
    auto wide = ds;
    wide.feature_names = {"extra", "f0", "f1", "f2"};
    for (auto& r : wide.rows) r.x.insert(r.x.begin(), 123.0);
    CHECK(gb.predict(wide) == gb.predict(ds));
    auto narrow = ds;
    narrow.feature_names = {"f0", "f1", "zz"};
    CHECK_THROWS_AS(gb.predict(narrow), DimensionMismatch);
}

TEST_CASE("learning curve") {
    const auto ds = noisy(300, 7);
    TrainParams params;
    params.gbdt.n_trees = 30;
    const auto [train, test] = time_ordered_split(ds, 0.7);
    const auto curve = learning_curve(train, test, params, {0.5, 1.0});
    REQUIRE(curve.points.size() == 2);
    const auto full = train_classifier(train, params);
    CHECK(curve.points.back().test_metric == evaluate_model(full, test).balanced_accuracy);
    CHECK(curve.points.back().train_metric == evaluate_model(full, train).balanced_accuracy);
    CHECK(curve.points.back().train_rows == train.rows.size());
    CHECK(curve.points.front().train_rows == static_cast<std::size_t>(std::ceil(0.5 * train.rows.size())));

    // The earliest rows are all robots.
    auto skewed = train;
    for (std::size_t i = 0; i < 10; ++i) skewed.rows[i].robot = true;
    const auto warned = learning_curve(skewed, test, params, {0.01, 1.0});
    CHECK(warned.points.size() == 1);
    CHECK(warned.warnings.size() == 1);

    const auto fr = default_curve_fractions();
    REQUIRE(fr.size() == 10);
    CHECK(fr.front() == doctest::Approx(0.1));
    CHECK(fr.back() == 1.0);
}
