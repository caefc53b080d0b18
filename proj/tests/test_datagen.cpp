#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "fedgwc/datagen.hpp"

using namespace fedgwc;

namespace {

FederationSpec two_group_spec(Domain second_domain, double alpha_a = 1000.0,
                              double alpha_b = 1000.0) {
    FederationSpec spec;
    spec.clients = 100;
    spec.classes = 5;
    spec.features = 8;
    spec.samples_per_client = 50;
    spec.groups = {{50, alpha_a, Domain::Clean}, {50, alpha_b, second_domain}};
    spec.seed = 31;
    return spec;
}

}  // namespace

TEST_CASE("alpha = 0 draws a one-hot histogram") {
    auto rng = make_engine(77);
    for (int i = 0; i < 50; ++i) {
        const ClassHistogram h = dirichlet_partition(0.0, 6, rng);
        int ones = 0;
        double sum = 0.0;
        for (double f : h.freqs) {
            sum += f;
            if (f == 1.0) ++ones;
            CHECK((f == 0.0 || f == 1.0));
        }
        CHECK(ones == 1);
        CHECK(sum == 1.0);
    }
}

TEST_CASE("histograms live on the simplex") {
    auto rng = make_engine(3);
    for (double alpha : {0.05, 0.5, 10.0}) {
        for (int i = 0; i < 200; ++i) {
            const ClassHistogram h = dirichlet_partition(alpha, 7, rng);
            double sum = 0.0;
            for (double f : h.freqs) {
                CHECK(f >= 0.0);
                sum += f;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("large alpha concentrates near uniform") {
    auto rng = make_engine(41);
    const int draws = 1000;
    int good = 0;
    for (int i = 0; i < draws; ++i) {
        const ClassHistogram h = dirichlet_partition(1000.0, 10, rng);
        double worst = 0.0;
        for (double f : h.freqs) worst = std::max(worst, std::abs(f - 0.1));
        if (worst <= 0.05) ++good;
    }
    CHECK(good >= 990);  // concentration holds with probability >= 0.99
}

TEST_CASE("dirichlet mean is uniform for any positive alpha") {
    auto rng = make_engine(55);
    const int C = 4;
    std::vector<double> mean(C, 0.0);
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const ClassHistogram h = dirichlet_partition(1.0, C, rng);
        for (int c = 0; c < C; ++c) mean[c] += h.freqs[c] / draws;
    }
    for (int c = 0; c < C; ++c) CHECK(std::abs(mean[c] - 1.0 / C) <= 0.01);
}

TEST_CASE("federation bookkeeping: sizes, ground truth, split") {
    const Federation fed = make_federation(two_group_spec(Domain::Noisy));
    CHECK(fed.clients.size() == 100);
    int first = 0, second = 0;
    for (const auto& c : fed.clients) {
        (c.group == 0 ? first : second)++;
        CHECK(c.train.size() == 40);  // 80 percent of 50
        CHECK(c.test.size() == 10);
        CHECK(c.train.features.cols() == 8);
    }
    CHECK(first == 50);
    CHECK(second == 50);
    const std::vector<int> gt = fed.ground_truth();
    CHECK(std::count(gt.begin(), gt.end(), 0) == 50);
    CHECK(std::count(gt.begin(), gt.end(), 1) == 50);
}

TEST_CASE("alpha = 0 group yields single-class client datasets") {
    FederationSpec spec = two_group_spec(Domain::Clean, 1000.0, 0.0);
    const Federation fed = make_federation(spec);
    for (const auto& c : fed.clients) {
        if (c.group != 1) continue;
        std::set<int> classes(c.train.labels.begin(), c.train.labels.end());
        classes.insert(c.test.labels.begin(), c.test.labels.end());
        CHECK(classes.size() == 1);
    }
}

TEST_CASE("identical spec and seed reproduce the federation bit-identically") {
    const FederationSpec spec = two_group_spec(Domain::Blurred, 0.5, 1000.0);
    const Federation a = make_federation(spec);
    const Federation b = make_federation(spec);
    REQUIRE(a.clients.size() == b.clients.size());
    for (std::size_t i = 0; i < a.clients.size(); ++i) {
        CHECK(a.clients[i].histogram.freqs == b.clients[i].histogram.freqs);
        CHECK(a.clients[i].train.features == b.clients[i].train.features);
        CHECK(a.clients[i].train.labels == b.clients[i].train.labels);
        CHECK(a.clients[i].test.features == b.clients[i].test.features);
    }
}

TEST_CASE("groups with identical alpha and domain are statistically exchangeable") {
    // Two-sample t statistic over per-client mean feature values; client means
    // are i.i.d. across the federation so the 1 percent normal threshold applies.
    const Federation fed = make_federation(two_group_spec(Domain::Clean));
    std::vector<double> means[2];
    for (const auto& c : fed.clients) {
        double m = 0.0;
        for (double v : c.train.features.values()) m += v;
        means[c.group].push_back(m / static_cast<double>(c.train.features.values().size()));
    }
    double avg[2] = {0, 0}, var[2] = {0, 0};
    for (int g = 0; g < 2; ++g) {
        for (double m : means[g]) avg[g] += m;
        avg[g] /= means[g].size();
        for (double m : means[g]) var[g] += (m - avg[g]) * (m - avg[g]);
        var[g] /= (means[g].size() - 1);
    }
    const double t = (avg[0] - avg[1]) /
                     std::sqrt(var[0] / means[0].size() + var[1] / means[1].size());
    CHECK(std::abs(t) < 2.576);
}

TEST_CASE("noisy and blurred domains actually transform the features") {
    FederationSpec spec = two_group_spec(Domain::Noisy);
    const Federation noisy = make_federation(spec);
    // per-sample variance around class means should be inflated for group 1
    double sq[2] = {0, 0};
    long n[2] = {0, 0};
    for (const auto& c : noisy.clients) {
        for (std::size_t i = 0; i < c.train.size(); ++i)
            for (std::size_t j = 0; j < c.train.features.cols(); ++j) {
                const double mean =
                    (static_cast<int>(j) == c.train.labels[i]) ? spec.feature_scale : 0.0;
                const double d = c.train.features(i, j) - mean;
                sq[c.group] += d * d;
                ++n[c.group];
            }
    }
    const double var_clean = sq[0] / n[0];
    const double var_noisy = sq[1] / n[1];
    CHECK(var_clean == doctest::Approx(1.0).epsilon(0.1));
    CHECK(var_noisy == doctest::Approx(1.0 + spec.noise_scale * spec.noise_scale).epsilon(0.1));
}

TEST_CASE("generated datasets match their drawn histogram (chi-square)") {
    FederationSpec spec;
    spec.clients = 20;
    spec.classes = 5;
    spec.features = 6;
    spec.samples_per_client = 1000;
    spec.groups = {{20, 10.0, Domain::Clean}};
    spec.seed = 13;
    const Federation fed = make_federation(spec);
    const double critical = 18.4668;  // chi-square df=4, upper 0.1 percent
    for (const auto& c : fed.clients) {
        ClientDataset all;
        all.features = Matrix(0, 0);
        all.labels = c.train.labels;
        all.labels.insert(all.labels.end(), c.test.labels.begin(), c.test.labels.end());
        std::vector<long> observed(spec.classes, 0);
        for (int y : all.labels) ++observed[y];
        double stat = 0.0;
        for (int k = 0; k < spec.classes; ++k) {
            const double expected = c.histogram.freqs[k] * spec.samples_per_client;
            if (expected == 0.0) {
                CHECK(observed[k] == 0);
                continue;
            }
            const double d = observed[k] - expected;
            stat += d * d / expected;
        }
        CHECK(stat < critical);
    }
}

TEST_CASE("spec validation") {
    FederationSpec spec = two_group_spec(Domain::Clean);
    spec.groups[0].size = 40;  // sums to 90 != 100
    CHECK_THROWS_AS(validate(spec), ConfigError);
    spec = two_group_spec(Domain::Clean);
    spec.features = 3;  // below class count
    CHECK_THROWS_AS(validate(spec), ConfigError);
    spec = two_group_spec(Domain::Clean);
    spec.groups[1].dirichlet_alpha = -1.0;
    CHECK_THROWS_AS(validate(spec), ConfigError);
}
