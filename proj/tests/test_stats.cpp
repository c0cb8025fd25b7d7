#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/degrade.hpp"
#include "core/erqa.hpp"
#include "core/error.hpp"
#include "core/stats.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

using namespace srm;

TEST_CASE("two-item fit matches the closed form") {
    const std::vector<ComparisonRecord> records = {{"a", "b", 3, 1}};
    const BtResult r = bt_fit(records);
    REQUIRE(r.items == std::vector<std::string>{"a", "b"});
    CHECK(r.abilities[0] == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(r.abilities[1] == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(r.converged);
    CHECK(r.abilities[0] + r.abilities[1] == doctest::Approx(1.0).epsilon(1e-12));

    // Display scores are log-abilities shifted so the weakest item sits at 0.
    CHECK(r.display_scores[1] == 0.0);
    CHECK(r.display_scores[0] ==
          doctest::Approx(std::log(r.abilities[0]) - std::log(r.abilities[1])).epsilon(1e-12));
}

TEST_CASE("fit recovers a known ranking from abundant votes") {
    // Win counts generated from fixed abilities via expected frequencies.
    const std::vector<double> truth = {0.40, 0.25, 0.18, 0.10, 0.07};
    const std::vector<std::string> names = {"v", "w", "x", "y", "z"};
    std::vector<ComparisonRecord> records;
    const int votes = 2000;
    for (std::size_t i = 0; i < truth.size(); ++i)
        for (std::size_t j = i + 1; j < truth.size(); ++j) {
            const double p = truth[i] / (truth[i] + truth[j]);
            const long long wins = std::llround(votes * p);
            records.push_back({names[i], names[j], wins, votes - wins});
        }
    const BtResult r = bt_fit(records);
    for (std::size_t i = 0; i < truth.size(); ++i)
        CHECK(r.abilities[i] == doctest::Approx(truth[i]).epsilon(0.02));
    CHECK(std::is_sorted(r.abilities.rbegin(), r.abilities.rend()));
}

TEST_CASE("log-likelihood never decreases across iterations") {
    std::mt19937_64 rng(131);
    std::uniform_int_distribution<long long> w(1, 20);
    std::vector<ComparisonRecord> records;
    const std::vector<std::string> names = {"a", "b", "c", "d"};
    for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t j = i + 1; j < names.size(); ++j)
            records.push_back({names[i], names[j], w(rng), w(rng)});
    const BtResult r = bt_fit(records);
    REQUIRE(r.log_likelihood_trace.size() >= 2);
    for (std::size_t i = 1; i < r.log_likelihood_trace.size(); ++i)
        CHECK(r.log_likelihood_trace[i] >= r.log_likelihood_trace[i - 1] - 1e-12);
}

TEST_CASE("disconnected comparison graphs are reported with their components") {
    const std::vector<ComparisonRecord> records = {{"a", "b", 2, 1}, {"c", "d", 1, 3}};
    try {
        bt_fit(records);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateInput);
        const std::string msg = e.what();
        CHECK(msg.find("disconnected") != std::string::npos);
        CHECK(msg.find('a') != std::string::npos);
        CHECK(msg.find('c') != std::string::npos);
    }
}

TEST_CASE("all-wins items need smoothing") {
    const std::vector<ComparisonRecord> records = {{"champ", "b", 4, 0}, {"b", "c", 2, 2}};
    try {
        bt_fit(records);
        FAIL("expected an error");
    } catch (const Error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("champ") != std::string::npos);
        CHECK(msg.find("smoothing") != std::string::npos);
    }

    BtOptions opts;
    opts.smoothing = 0.5;
    const BtResult r = bt_fit(records, opts);
    CHECK(r.converged);
    CHECK(r.abilities[0] > r.abilities[1]);
}

TEST_CASE("bt input validation") {
    CHECK_THROWS_AS(bt_fit({}), Error);
    CHECK_THROWS_AS(bt_fit({{"a", "a", 1, 1}}), Error);          // self-comparison
    CHECK_THROWS_AS(bt_fit({{"a", "b", -1, 1}}), Error);         // negative wins
    CHECK_THROWS_AS(bt_fit({{"", "b", 1, 1}}), Error);           // empty name
    CHECK_THROWS_AS(bt_fit({{"a", "b", 0, 0}}), Error);          // no information
    BtOptions opts;
    opts.smoothing = -0.5;
    CHECK_THROWS_AS(bt_fit({{"a", "b", 1, 1}}, opts), Error);
}

TEST_CASE("plcc matches the documented example and basic identities") {
    CHECK(plcc({1, 2, 3, 4}, {1, 3, 2, 4}) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(plcc({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(plcc({1, 2, 3}, {6, 4, 2}) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK_THROWS_AS(plcc({1, 2}, {1, 2}), Error);          // too short
    CHECK_THROWS_AS(plcc({1, 2, 3}, {1, 2}), Error);       // length mismatch
    CHECK_THROWS_AS(plcc({1, 1, 1}, {1, 2, 3}), Error);    // zero variance
}

TEST_CASE("correlations agree with direct formulas on random vectors") {
    std::mt19937_64 rng(151);
    std::uniform_real_distribution<double> v(-10.0, 10.0);
    std::uniform_int_distribution<int> len(3, 40);
    std::uniform_int_distribution<int> grid(0, 8);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = len(rng);
        std::vector<double> x(n), y(n);
        for (int i = 0; i < n; ++i) {
            x[i] = v(rng);
            // Every second trial snaps y to a coarse grid to force rank ties.
            y[i] = trial % 2 == 0 ? v(rng) : static_cast<double>(grid(rng));
        }
        const bool y_degenerate =
            std::all_of(y.begin(), y.end(), [&](double q) { return q == y[0]; });
        if (y_degenerate) continue;
        CAPTURE(trial);
        CHECK(plcc(x, y) == doctest::Approx(oracle::plcc(x, y)).epsilon(1e-12));
        CHECK(srcc(x, y) == doctest::Approx(oracle::srcc(x, y)).epsilon(1e-12));
    }
}

TEST_CASE("average ranks share tie spans") {
    CHECK(average_ranks({10, 20, 20, 30}) == std::vector<double>{1.0, 2.5, 2.5, 4.0});
    CHECK(average_ranks({5, 5, 5}) == std::vector<double>{2.0, 2.0, 2.0});
    CHECK(average_ranks({3, 1, 2}) == std::vector<double>{3.0, 1.0, 2.0});
}

TEST_CASE("srcc is invariant under monotone transforms") {
    std::mt19937_64 rng(161);
    std::uniform_real_distribution<double> v(0.1, 10.0);
    std::vector<double> x(20), y(20), fx(20);
    for (int i = 0; i < 20; ++i) {
        x[i] = v(rng);
        y[i] = v(rng);
        fx[i] = std::exp(x[i] * 0.3); // strictly increasing
    }
    CHECK(srcc(x, y) == doctest::Approx(srcc(fx, y)).epsilon(1e-12));
}

TEST_CASE("k-medoids recovers separated blobs") {
    std::mt19937_64 rng(171);
    std::normal_distribution<double> jitter(0.0, 0.3);
    const double centers[3][2] = {{0, 0}, {10, 0}, {0, 10}};
    FeatureMatrix m;
    m.col_ids = {"f1", "f2"};
    std::vector<int> truth;
    for (int b = 0; b < 3; ++b)
        for (int i = 0; i < 8; ++i) {
            m.row_ids.push_back("r" + std::to_string(m.row_ids.size()));
            m.values.push_back(centers[b][0] + jitter(rng));
            m.values.push_back(centers[b][1] + jitter(rng));
            truth.push_back(b);
        }
    const KMedoidsResult r = kmedoids(m, 3, 9);
    CHECK(r.seed == 9);
    CHECK(std::is_sorted(r.medoids.begin(), r.medoids.end()));
    CHECK(r.cost <= r.build_cost + 1e-12);
    // All rows of one blob share a medoid, and distinct blobs use distinct ones.
    for (std::size_t i = 0; i < truth.size(); ++i)
        for (std::size_t j = 0; j < truth.size(); ++j) {
            if (truth[i] == truth[j])
                CHECK(r.assignment[i] == r.assignment[j]);
            else
                CHECK(r.assignment[i] != r.assignment[j]);
        }
    // Medoids are assigned to themselves.
    for (std::size_t medoid : r.medoids) CHECK(r.assignment[medoid] == medoid);
}

TEST_CASE("k-medoids with k=1 finds the exhaustive minimizer") {
    std::mt19937_64 rng(181);
    std::uniform_real_distribution<double> v(-5.0, 5.0);
    for (int trial = 0; trial < 10; ++trial) {
        FeatureMatrix m;
        m.col_ids = {"a", "b", "c"};
        const int n = 12;
        for (int i = 0; i < n; ++i) {
            m.row_ids.push_back("r" + std::to_string(i));
            for (int c = 0; c < 3; ++c) m.values.push_back(v(rng));
        }
        const KMedoidsResult r = kmedoids(m, 1, 0);

        // Exhaustive: z-score, then try every row as the sole medoid.
        std::vector<double> z = m.values;
        for (int c = 0; c < 3; ++c) {
            double mean = 0.0;
            for (int i = 0; i < n; ++i) mean += m.at(i, c);
            mean /= n;
            double var = 0.0;
            for (int i = 0; i < n; ++i) var += (m.at(i, c) - mean) * (m.at(i, c) - mean);
            const double sd = std::sqrt(var / n);
            for (int i = 0; i < n; ++i) z[i * 3 + c] = (m.at(i, c) - mean) / sd;
        }
        double best = std::numeric_limits<double>::infinity();
        for (int cand = 0; cand < n; ++cand) {
            double cost = 0.0;
            for (int i = 0; i < n; ++i) {
                double d2 = 0.0;
                for (int c = 0; c < 3; ++c) {
                    const double d = z[i * 3 + c] - z[cand * 3 + c];
                    d2 += d * d;
                }
                cost += std::sqrt(d2);
            }
            best = std::min(best, cost);
        }
        CHECK(r.cost == doctest::Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("constant feature columns are dropped and reported") {
    FeatureMatrix m;
    m.col_ids = {"varies", "flat", "alive"};
    for (int i = 0; i < 6; ++i) {
        m.row_ids.push_back("r" + std::to_string(i));
        m.values.push_back(i);
        m.values.push_back(3.25);
        m.values.push_back(i % 2);
    }
    const KMedoidsResult r = kmedoids(m, 2, 0);
    REQUIRE(r.dropped_columns == std::vector<std::size_t>{1});

    // Scaling one surviving column leaves the z-scored clustering unchanged.
    FeatureMatrix scaled = m;
    for (int i = 0; i < 6; ++i) scaled.values[i * 3] *= 1000.0;
    const KMedoidsResult r2 = kmedoids(scaled, 2, 0);
    CHECK(r2.medoids == r.medoids);
    CHECK(r2.assignment == r.assignment);

    FeatureMatrix all_flat;
    all_flat.col_ids = {"x"};
    for (int i = 0; i < 4; ++i) {
        all_flat.row_ids.push_back("r" + std::to_string(i));
        all_flat.values.push_back(1.0);
    }
    CHECK_THROWS_AS(kmedoids(all_flat, 2, 0), Error);
}

TEST_CASE("k-medoids validates inputs") {
    FeatureMatrix m;
    m.col_ids = {"a"};
    for (int i = 0; i < 4; ++i) {
        m.row_ids.push_back("r" + std::to_string(i));
        m.values.push_back(i);
    }
    CHECK_THROWS_AS(kmedoids(m, 0, 0), Error);
    CHECK_THROWS_AS(kmedoids(m, 5, 0), Error); // k > rows
    CHECK_NOTHROW(kmedoids(m, 4, 0));          // k == rows is fine: cost 0
    CHECK(kmedoids(m, 4, 0).cost == 0.0);

    FeatureMatrix bad = m;
    bad.values[2] = std::nan("");
    CHECK_THROWS_AS(kmedoids(bad, 2, 0), Error);

    FeatureMatrix unshaped = m;
    unshaped.values.pop_back();
    CHECK_THROWS_AS(kmedoids(unshaped, 2, 0), Error);
}

TEST_CASE("psnr follows the log formula with peak one") {
    const Frame a = testutil::value_noise(32, 24, 201);
    Frame b = a;
    for (auto& v : b.data) v = testutil::clamp01(v + 0.1);
    CHECK(psnr(a, b) == doctest::Approx(oracle::psnr(a, b)).epsilon(1e-12));
    CHECK(std::isinf(psnr(a, a)));
    CHECK(psnr(a, a) > 0);

    const Frame half = testutil::constant(10, 10, 1, 0.5f);
    const Frame zero = testutil::constant(10, 10, 1, 0.0f);
    CHECK(psnr(half, zero) == doctest::Approx(10.0 * std::log10(1.0 / 0.25)).epsilon(1e-9));

    CHECK_THROWS_AS(psnr(a, testutil::constant(32, 23, 1, 0.f)), Error);
}

TEST_CASE("ssim is exactly one on identical frames") {
    const Frame frames[] = {
        testutil::value_noise(48, 36, 211),
        testutil::rgb_noise(20, 20, 212),
        testutil::checkerboard(16, 16, 3),
    };
    for (const Frame& f : frames) CHECK(ssim(f, f) == 1.0);
}

TEST_CASE("ssim agrees with a naive window implementation") {
    int seed = 220;
    for (int trial = 0; trial < 4; ++trial) {
        const Frame a = testutil::value_noise(36, 28, seed++);
        Frame b = gaussian_blur(a, 0.8);
        CHECK(ssim(a, b) == doctest::Approx(oracle::ssim(a, b)).epsilon(1e-9));
        CHECK(ssim(a, b) < 1.0);
        CHECK(ssim(a, b) > 0.0);
    }
    const Frame rgb_a = testutil::rgb_noise(24, 24, 230);
    const Frame rgb_b = testutil::rgb_noise(24, 24, 231);
    CHECK(ssim(rgb_a, rgb_b) == doctest::Approx(oracle::ssim(rgb_a, rgb_b)).epsilon(1e-9));
}

TEST_CASE("ssim needs at least one full window") {
    const Frame small = testutil::value_noise(10, 14, 240);
    CHECK_THROWS_AS(ssim(small, small), Error);
    const Frame fits = testutil::value_noise(11, 11, 241);
    CHECK(ssim(fits, fits) == 1.0);
}

TEST_CASE("global shift search recovers translations on the overlap") {
    const Frame f = testutil::value_noise(40, 30, 251);
    for (const Shift d : {Shift{2, -3}, Shift{-5, 0}, Shift{0, 5}, Shift{1, 1}}) {
        const Frame moved = translate_frame(f, d.dx, d.dy);
        const GlobalShift g = global_shift_psnr(f, moved);
        CAPTURE(d.dx);
        CAPTURE(d.dy);
        CHECK(g.shift == d);
        CHECK(std::isinf(g.psnr_db));
    }
}

TEST_CASE("global shift ties resolve in enumeration order") {
    const Frame flat = testutil::constant(16, 16, 1, 0.5f);
    const GlobalShift g = global_shift_psnr(flat, flat);
    CHECK(g.shift == Shift{0, 0});
    CHECK(std::isinf(g.psnr_db));
}

TEST_CASE("global shift validates arguments") {
    const Frame f = testutil::value_noise(16, 16, 261);
    CHECK_THROWS_AS(global_shift_psnr(f, testutil::value_noise(16, 15, 1)), Error);
    CHECK_THROWS_AS(global_shift_psnr(f, f, -1), Error);
    const GlobalShift g = global_shift_psnr(f, f, 0);
    CHECK(g.shift == Shift{0, 0});
}

TEST_CASE("shift histograms tally per-frame winners") {
    FrameSequence gt, dist;
    const Frame f = testutil::value_noise(32, 24, 271);
    const Shift shifts[] = {{1, 0}, {1, 0}, {-2, 2}, {0, 0}};
    for (const Shift& s : shifts) {
        gt.frames.push_back(f);
        dist.frames.push_back(translate_frame(f, s.dx, s.dy));
    }
    for (unsigned jobs : {1u, 3u}) {
        const ShiftHistogram h = shift_distribution(gt, dist, 5, jobs);
        CHECK(h.radius == 5);
        REQUIRE(h.per_frame.size() == 4);
        CHECK(h.at(1, 0) == 2);
        CHECK(h.at(-2, 2) == 1);
        CHECK(h.at(0, 0) == 1);
        CHECK(h.at(3, 3) == 0);
        std::size_t total = 0;
        for (std::size_t c : h.counts) total += c;
        CHECK(total == 4);
        CHECK(h.per_frame[2] == Shift{-2, 2});
    }

    FrameSequence shorter = dist;
    shorter.frames.pop_back();
    CHECK_THROWS_AS(shift_distribution(gt, shorter, 5), Error);
}
