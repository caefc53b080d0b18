#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fedgwc/metrics.hpp"

using namespace fedgwc;

namespace {

ClassHistogram simplex_draw(int C, std::mt19937_64& eng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    ClassHistogram h;
    h.freqs.resize(C);
    double sum = 0.0;
    for (double& f : h.freqs) {
        f = -std::log(uni(eng) + 1e-300);  // exponential spacings -> uniform simplex
        sum += f;
    }
    for (double& f : h.freqs) f /= sum;
    return h;
}

// Exhaustive-permutation oracle: the Wasserstein distance between two
// empirical measures is the minimum over all pairings of the entries.
double brute_force_wasserstein(const ClassHistogram& a, const ClassHistogram& b, int p) {
    const int C = static_cast<int>(a.freqs.size());
    std::vector<int> perm(C);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double acc = 0.0;
        for (int i = 0; i < C; ++i) acc += std::pow(std::abs(a.freqs[i] - b.freqs[perm[i]]), p);
        best = std::min(best, acc);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::pow(best / C, 1.0 / p);
}

}  // namespace

TEST_CASE("distance to a permutation of itself is zero") {
    std::mt19937_64 eng(1);
    for (int trial = 0; trial < 50; ++trial) {
        ClassHistogram a = simplex_draw(6, eng);
        ClassHistogram b = a;
        std::shuffle(b.freqs.begin(), b.freqs.end(), eng);
        CHECK(wasserstein_distance(a, b) == 0.0);
    }
}

TEST_CASE("hand value: one-hot vs uniform on three classes") {
    const ClassHistogram a{{1.0, 0.0, 0.0}};
    const ClassHistogram b{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
    // ranked diffs (2/3, 1/3, 1/3): mean square 2/9
    CHECK(wasserstein_distance(a, b, 2) == doctest::Approx(std::sqrt(2.0 / 9.0)).epsilon(1e-9));
    CHECK(wasserstein_distance(a, b, 2) == doctest::Approx(0.47140452079103173).epsilon(1e-9));
}

TEST_CASE("closed form equals the exhaustive-permutation minimum") {
    std::mt19937_64 eng(77);
    std::uniform_int_distribution<int> pick_c(2, 5);
    std::uniform_int_distribution<int> pick_p(1, 3);
    for (int trial = 0; trial < 300; ++trial) {
        const int C = pick_c(eng);
        const int p = pick_p(eng);
        const ClassHistogram a = simplex_draw(C, eng);
        const ClassHistogram b = simplex_draw(C, eng);
        const double closed = wasserstein_distance(a, b, p);
        const double brute = brute_force_wasserstein(a, b, p);
        CHECK(std::abs(closed - brute) <= 1e-12);
    }
}

TEST_CASE("metric axioms on the ranked representation") {
    std::mt19937_64 eng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const ClassHistogram a = simplex_draw(5, eng);
        const ClassHistogram b = simplex_draw(5, eng);
        const ClassHistogram c = simplex_draw(5, eng);
        const double dab = wasserstein_distance(a, b);
        const double dba = wasserstein_distance(b, a);
        CHECK(dab == dba);  // identical computation after ranking
        CHECK(dab >= 0.0);
        CHECK(wasserstein_distance(a, a) == 0.0);
        // identity of indiscernibles up to ranking
        if (dab == 0.0) {
            const RankedHistogram ra = rank_histogram(a);
            const RankedHistogram rb = rank_histogram(b);
            for (std::size_t i = 0; i < ra.freqs.size(); ++i)
                CHECK(ra.freqs[i] == rb.freqs[i]);
        }
        CHECK(wasserstein_distance(a, c) <= dab + wasserstein_distance(b, c) + 1e-12);
    }
}

TEST_CASE("wasserstein validation") {
    CHECK_THROWS_AS(wasserstein_distance({{0.5, 0.5}}, {{1.0, 0.0, 0.0}}), ShapeError);
    CHECK_THROWS_AS(wasserstein_distance({{0.5, 0.5}}, {{1.0, 0.0}}, 0), DomainError);
}

TEST_CASE("WAS: identical within, distinct across gives 1") {
    const ClassHistogram ha{{0.9, 0.1, 0.0}};
    const ClassHistogram hb{{0.4, 0.3, 0.3}};
    const std::vector<ClassHistogram> hs{ha, ha, ha, hb, hb, hb};
    const std::vector<int> labels{0, 0, 0, 1, 1, 1};
    CHECK(was_score(hs, labels) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("WAS: identical histograms everywhere resolve to 0") {
    const ClassHistogram h{{0.5, 0.25, 0.25}};
    const std::vector<ClassHistogram> hs{h, h, h, h, h, h};
    const std::vector<int> labels{0, 1, 0, 1, 1, 0};
    CHECK(was_score(hs, labels) == 0.0);
}

TEST_CASE("WAS: four-client hand instance against a direct evaluation") {
    // clients 0,1 in cluster 0; clients 2,3 in cluster 1 (ranked vectors shown)
    const ClassHistogram h0{{0.8, 0.2, 0.0}};
    const ClassHistogram h1{{0.7, 0.2, 0.1}};
    const ClassHistogram h2{{0.4, 0.4, 0.2}};
    const ClassHistogram h3{{0.5, 0.3, 0.2}};
    const std::vector<ClassHistogram> hs{h0, h1, h2, h3};
    const std::vector<int> labels{0, 0, 1, 1};

    auto d = [&](const ClassHistogram& x, const ClassHistogram& y) {
        return wasserstein_distance(x, y);
    };
    // silhouette by the definition: a_i intra mean, b_i best outer mean
    double expected = 0.0;
    {
        const double a0 = d(h0, h1), b0 = (d(h0, h2) + d(h0, h3)) / 2;
        expected += (b0 - a0) / std::max(a0, b0);
        const double a1 = d(h1, h0), b1 = (d(h1, h2) + d(h1, h3)) / 2;
        expected += (b1 - a1) / std::max(a1, b1);
        const double a2 = d(h2, h3), b2 = (d(h2, h0) + d(h2, h1)) / 2;
        expected += (b2 - a2) / std::max(a2, b2);
        const double a3 = d(h3, h2), b3 = (d(h3, h0) + d(h3, h1)) / 2;
        expected += (b3 - a3) / std::max(a3, b3);
        expected /= 4.0;
    }
    CHECK(was_score(hs, labels) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("WAS: singleton clusters contribute zero") {
    const ClassHistogram ha{{1.0, 0.0}};
    const ClassHistogram hb{{0.5, 0.5}};
    const std::vector<ClassHistogram> hs{ha, ha, hb};
    const std::vector<int> labels{0, 0, 1};
    // third client is a singleton: contributes 0; first two have a=0 -> s=1
    CHECK(was_score(hs, labels) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK_THROWS_AS(was_score(hs, {0, 0, 0}), DomainError);
}

TEST_CASE("WADB: tight separated clusters score near zero, mixed above one") {
    const ClassHistogram ha{{0.9, 0.1, 0.0}};
    const ClassHistogram hb{{0.34, 0.33, 0.33}};
    const std::vector<ClassHistogram> tight{ha, ha, ha, hb, hb, hb};
    CHECK(wadb_score(tight, {0, 0, 0, 1, 1, 1}) <= 1e-12);  // centroid round-off only

    // one mixed population split at random into two clusters
    std::mt19937_64 eng(9);
    std::vector<ClassHistogram> mixed;
    std::vector<int> random_labels;
    for (int i = 0; i < 20; ++i) {
        mixed.push_back(simplex_draw(4, eng));
        random_labels.push_back(i % 2);
    }
    CHECK(wadb_score(mixed, random_labels) > 1.0);
}

TEST_CASE("WAS and WADB are invariant to per-client class permutations") {
    std::mt19937_64 eng(123);
    std::vector<ClassHistogram> hs;
    std::vector<int> labels;
    for (int i = 0; i < 12; ++i) {
        hs.push_back(simplex_draw(5, eng));
        labels.push_back(i / 4);
    }
    std::vector<ClassHistogram> shuffled = hs;
    for (auto& h : shuffled) std::shuffle(h.freqs.begin(), h.freqs.end(), eng);
    CHECK(was_score(shuffled, labels) == was_score(hs, labels));
    CHECK(wadb_score(shuffled, labels) == wadb_score(hs, labels));
}

TEST_CASE("rand index") {
    CHECK(rand_index({0, 0, 1, 1}, {1, 1, 0, 0}) == 1.0);  // identical up to renaming
    CHECK(rand_index({0, 1, 2, 3}, {0, 0, 0, 0}) == 0.0);  // singletons vs all-together
    CHECK(rand_index({0, 0, 1, 1}, {0, 1, 0, 1}) == doctest::Approx(2.0 / 6.0));
    CHECK_THROWS_AS(rand_index({0, 1}, {0, 1, 2}), ShapeError);

    std::mt19937_64 eng(6);
    std::uniform_int_distribution<int> lab(0, 3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<int> a(10), relabeled(10);
        for (int& x : a) x = lab(eng);
        const int offset = 1 + static_cast<int>(eng() % 3);
        for (std::size_t i = 0; i < a.size(); ++i) relabeled[i] = (a[i] + offset) % 4;
        const double r = rand_index(a, relabeled);
        CHECK(r == 1.0);  // renaming never changes the partition
        std::vector<int> b(10);
        for (int& x : b) x = lab(eng);
        const double rb = rand_index(a, b);
        CHECK(rb >= 0.0);
        CHECK(rb <= 1.0);
    }
}

TEST_CASE("balanced accuracy") {
    CHECK(balanced_accuracy({0, 1, 2}, {0, 1, 2}, 3) == 1.0);
    // constant predictor on a balanced two-class set
    CHECK(balanced_accuracy({0, 0, 0, 0}, {0, 0, 1, 1}, 2) == doctest::Approx(0.5));
    // recalls (1, 0.5, 0) -> 0.5
    CHECK(balanced_accuracy({0, 0, 1, 0, 0, 1}, {0, 0, 1, 1, 2, 2}, 3) ==
          doctest::Approx(0.5).epsilon(1e-15));
    // absent classes are excluded from the mean
    CHECK(balanced_accuracy({0, 0}, {0, 0}, 5) == 1.0);
    CHECK_THROWS_AS(balanced_accuracy({}, {}, 2), ShapeError);
}
