#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "gibbslab/exact.hpp"
#include "gibbslab/rng.hpp"
#include "support/naive.hpp"

using namespace gibbslab;

TEST_CASE("gray walk visits every configuration exactly once, one site at a "
          "time") {
    auto box = Box::make(1, {{0, 3}});
    auto bc = BoundaryCondition::free_boundary(box);
    for (int q : {2, 3, 5}) {
        std::vector<std::int32_t> sites(4);
        std::iota(sites.begin(), sites.end(), 0);
        SpinConfig cfg(box);
        std::set<std::vector<std::uint8_t>> seen;
        std::vector<std::uint8_t> prev;
        std::int64_t total = 1;
        for (int k = 0; k < 4; ++k) total *= q;
        for_each_config(box, bc, q, sites, cfg, 0, total,
                        [&](const SpinConfig& c, std::int64_t agr) {
                            std::vector<std::uint8_t> cur(c.raw().begin(),
                                                          c.raw().end());
                            CHECK(agr == -naive::hamiltonian(box, bc, c));
                            if (!prev.empty()) {
                                int changed = 0;
                                for (std::size_t i = 0; i < cur.size(); ++i)
                                    if (cur[i] != prev[i]) {
                                        ++changed;
                                        // modular step: +1 mod q on colors
                                        CHECK((int(prev[i]) % q) + 1 ==
                                              int(cur[i]));
                                    }
                                CHECK(changed == 1);
                            }
                            prev = cur;
                            CHECK(seen.insert(cur).second);
                        });
        CHECK(static_cast<std::int64_t>(seen.size()) == total);
    }
}

TEST_CASE("gray rank decoding matches a serial walk") {
    auto box = Box::make(1, {{0, 4}});
    auto bc = BoundaryCondition::free_boundary(box);
    int q = 3;
    std::vector<std::int32_t> sites(5);
    std::iota(sites.begin(), sites.end(), 0);
    std::int64_t total = 243;
    std::vector<std::vector<std::uint8_t>> serial;
    SpinConfig cfg(box);
    for_each_config(box, bc, q, sites, cfg, 0, total,
                    [&](const SpinConfig& c, std::int64_t) {
                        serial.emplace_back(c.raw().begin(), c.raw().end());
                    });
    for (std::int64_t r : {std::int64_t(0), std::int64_t(1), std::int64_t(17),
                           std::int64_t(100), std::int64_t(242)}) {
        SpinConfig cfg2(box);
        std::vector<std::vector<std::uint8_t>> from_r;
        for_each_config(box, bc, q, sites, cfg2, r, total,
                        [&](const SpinConfig& c, std::int64_t) {
                            from_r.emplace_back(c.raw().begin(), c.raw().end());
                        });
        CHECK(from_r.size() == static_cast<std::size_t>(total - r));
        for (std::size_t k = 0; k < from_r.size(); ++k)
            CHECK(from_r[k] == serial[static_cast<std::size_t>(r) + k]);
    }
}

TEST_CASE("partition function closed forms on tiny systems") {
    SUBCASE("two-site free chain, q = 2: Z = 2e^beta + 2") {
        auto box = Box::make(1, {{0, 1}});
        auto bc = BoundaryCondition::free_boundary(box);
        for (double beta : {0.0, 0.5, 1.0, 3.0}) {
            auto m = ExactMeasure::enumerate(box, bc, ModelParams(2, beta));
            CHECK(m.log_partition() ==
                  doctest::Approx(std::log(2 * std::exp(beta) + 2))
                      .epsilon(1e-13));
        }
    }
    SUBCASE("single site d=2, pure 1, q = 2: P(sigma=1) = e^{4b}/(e^{4b}+1)") {
        auto box = Box::make(2, {{0, 0}, {0, 0}});
        auto bc = BoundaryCondition::pure(box, 1);
        for (double beta : {0.0, 0.3, 1.0, 2.5}) {
            auto m = ExactMeasure::enumerate(box, bc, ModelParams(2, beta));
            auto ev = event_site_color(box, std::vector<int>{0, 0}, 1);
            double expect = std::exp(4 * beta) / (std::exp(4 * beta) + 1);
            CHECK(m.prob(ev) == doctest::Approx(expect).epsilon(1e-13));
        }
    }
    SUBCASE("beta = 0 is uniform over q^n states") {
        auto box = Box::make(2, {{0, 1}, {0, 1}});
        auto bc = BoundaryCondition::pure(box, 2);
        for (int q : {2, 3}) {
            auto m = ExactMeasure::enumerate(box, bc, ModelParams(q, 0.0));
            CHECK(m.log_partition() ==
                  doctest::Approx(4 * std::log(q)).epsilon(1e-14));
            auto table = m.full_distribution();
            for (double p : table)
                CHECK(p == doctest::Approx(1.0 / std::pow(q, 4)).epsilon(1e-13));
        }
    }
}

TEST_CASE("enumerate agrees with brute force on random small instances") {
    PhiloxRng rng(23, 0);
    for (int rep = 0; rep < 8; ++rep) {
        int d = 1 + static_cast<int>(rng.uniform_below(2));
        std::vector<std::pair<int, int>> ranges;
        for (int k = 0; k < d; ++k) {
            int lo = -1 + static_cast<int>(rng.uniform_below(2));
            ranges.push_back({lo, lo + 1 + static_cast<int>(rng.uniform_below(2))});
        }
        auto box = Box::make(d, ranges);
        if (box.interior_count() > 9) continue;
        int q = 2 + static_cast<int>(rng.uniform_below(2));
        double beta = 0.25 * rng.uniform_below(9);
        std::vector<std::uint8_t> bv(
            static_cast<std::size_t>(box.boundary_count()));
        for (auto& v : bv)
            v = static_cast<std::uint8_t>(
                rng.uniform_below(static_cast<std::uint32_t>(q + 1)));
        auto bc = BoundaryCondition::from_values(box, bv);
        ModelParams p(q, beta);
        auto m = ExactMeasure::enumerate(box, bc, p);
        CHECK(m.log_partition() ==
              doctest::Approx(naive::log_z(box, bc, p)).epsilon(1e-12));
        auto table = m.full_distribution();
        auto ref = naive::full_distribution(box, bc, p);
        REQUIRE(table.size() == ref.size());
        double tv = 0;
        for (std::size_t i = 0; i < table.size(); ++i)
            tv += std::abs(table[i] - ref[i]);
        CHECK(0.5 * tv <= 1e-13);
    }
}

TEST_CASE("normalization: probabilities over a partition sum to one") {
    auto box = Box::make(3, {{0, 1}, {0, 1}, {-2, 1}});
    auto bc = BoundaryCondition::dobrushin(box, 2, 0, 2, 1);
    ModelParams p(2, 6.0);  // deep order: log-weights span a huge range
    auto m = ExactMeasure::enumerate(box, bc, p);
    auto plus = event_site_color(box, std::vector<int>{0, 0, 0}, 2);
    auto minus = event_site_color(box, std::vector<int>{0, 0, 0}, 1);
    std::array<Event, 3> evs{plus, minus, event_full()};
    auto pr = m.probabilities(evs);
    CHECK(std::abs(pr[0] + pr[1] - 1.0) <= 1e-12);
    CHECK(std::abs(pr[2] - 1.0) <= 1e-12);
    for (double x : pr) CHECK(x >= 0.0);
}

TEST_CASE("multithreaded enumeration matches single-threaded") {
    auto box = Box::make(3, {{0, 1}, {0, 1}, {-3, 2}});
    auto bc = BoundaryCondition::dobrushin(box, 2, 0, 2, 1);
    ModelParams p(2, 1.5);
    EnumerationLimits serial{1 << 26, 1};
    EnumerationLimits parallel{1 << 26, 2};
    auto m1 = ExactMeasure::enumerate(box, bc, p, serial);
    auto m2 = ExactMeasure::enumerate(box, bc, p, parallel);
    // integer histograms make the two bitwise identical
    CHECK(m1.log_partition() == m2.log_partition());
    auto ev = event_site_color(box, std::vector<int>{0, 0, 1}, 2);
    CHECK(m1.prob(ev) == m2.prob(ev));
}

TEST_CASE("cap errors are explicit") {
    auto box = Box::make(2, {{0, 5}, {0, 5}});  // 36 sites
    auto bc = BoundaryCondition::free_boundary(box);
    CHECK_THROWS_AS(
        ExactMeasure::enumerate(box, bc, ModelParams(2, 1.0)),
        CapExceeded);
    try {
        ExactMeasure::enumerate(box, bc, ModelParams(3, 1.0));
    } catch (const CapExceeded& e) {
        std::string msg = e.what();
        CHECK(msg.find("3^36") != std::string::npos);
    }
}

TEST_CASE("conditional probabilities") {
    auto box = Box::make(2, {{0, 1}, {0, 1}});
    auto bc = BoundaryCondition::free_boundary(box);
    SUBCASE("independent at beta = 0") {
        auto m = ExactMeasure::enumerate(box, bc, ModelParams(3, 0.0));
        auto a = event_site_color(box, std::vector<int>{0, 0}, 1);
        auto b = event_site_color(box, std::vector<int>{1, 1}, 2);
        CHECK(m.conditional(a, b) == doctest::Approx(m.prob(a)).epsilon(1e-13));
    }
    SUBCASE("conditioning on an almost-sure event returns the marginal") {
        auto m = ExactMeasure::enumerate(box, bc, ModelParams(2, 0.7));
        auto a = event_site_color(box, std::vector<int>{0, 0}, 1);
        CHECK(m.conditional(a, event_full()) ==
              doctest::Approx(m.prob(a)).epsilon(1e-14));
    }
    SUBCASE("null conditioning throws") {
        auto m = ExactMeasure::enumerate(box, bc, ModelParams(2, 1.0));
        Event never{"never", [](const SpinConfig&) { return false; }};
        auto a = event_site_color(box, std::vector<int>{0, 0}, 1);
        CHECK_THROWS_AS(m.conditional(a, never), std::invalid_argument);
        CHECK(m.prob(never) == 0.0);
    }
}

TEST_CASE("mixture measure") {
    auto box = Box::make(3, {{0, 1}, {0, 1}, {-2, 1}});
    ModelParams p(2, 2.0);
    auto mix = dobrushin_mixture(box, p, 2, 0, 2, 1);
    SUBCASE("site law is exactly 1/2 on the symmetric box") {
        for (auto z : {0, 1, -1, -2}) {
            auto ev = event_site_color(box, std::vector<int>{0, 0, z}, 2);
            CHECK(std::abs(mix.prob(ev) - 0.5) <= 1e-13);
        }
    }
    SUBCASE("odd observables vanish") {
        Observable center_spin{
            "pm_spin",
            [idx = box.require_interior(std::vector<int>{1, 1, 0})](
                const SpinConfig& s) {
                return s.value(idx) == 2 ? 1.0 : -1.0;
            }};
        auto e = mix.expectations({&center_spin, 1});
        CHECK(std::abs(e[0]) <= 1e-13);
    }
    SUBCASE("weights validated") {
        auto c = std::make_shared<ExactMeasure>(ExactMeasure::enumerate(
            box, BoundaryCondition::pure(box, 1), p));
        CHECK_THROWS_AS(MixtureMeasure({0.7, 0.7}, {c, c}),
                        std::invalid_argument);
        CHECK_THROWS_AS(MixtureMeasure({-0.5, 1.5}, {c, c}),
                        std::invalid_argument);
    }
}

TEST_CASE("mixture conditional exceeds 1/2 across the interface at large "
          "beta") {
    auto box = Box::make(3, {{0, 1}, {0, 1}, {-3, 2}});
    ModelParams p(2, 4.0);
    auto mix = dobrushin_mixture(box, p, 2, 0, 2, 1);
    auto plus_at_z = event_site_color(box, std::vector<int>{0, 0, 1}, 2);
    auto minus_at_zhat = event_site_color(box, std::vector<int>{0, 0, -2}, 1);
    double cond = mix.conditional(plus_at_z, minus_at_zhat);
    CHECK(cond > 0.5);
    CHECK(std::abs(mix.prob(plus_at_z) - 0.5) <= 1e-12);
}

TEST_CASE("dlr consistency") {
    SUBCASE("3x3 box, center subbox, random bc") {
        auto box = Box::make(2, {{0, 2}, {0, 2}});
        auto sub = Box::make(2, {{1, 1}, {1, 1}});
        PhiloxRng rng(41, 0);
        std::vector<std::uint8_t> bv(
            static_cast<std::size_t>(box.boundary_count()));
        for (auto& v : bv)
            v = static_cast<std::uint8_t>(rng.uniform_below(3));
        auto bc = BoundaryCondition::from_values(box, bv);
        CHECK(dlr_check(box, bc, ModelParams(2, 1.2), sub) <= 1e-12);
    }
    SUBCASE("subbox equals box") {
        auto box = Box::make(2, {{0, 1}, {0, 1}});
        auto bc = BoundaryCondition::pure(box, 1);
        CHECK(dlr_check(box, bc, ModelParams(2, 0.8), box) <= 1e-12);
    }
    SUBCASE("beta = 0 product measure") {
        auto box = Box::make(2, {{0, 2}, {0, 1}});
        auto sub = Box::make(2, {{1, 1}, {0, 1}});
        auto bc = BoundaryCondition::pure(box, 1);
        CHECK(dlr_check(box, bc, ModelParams(3, 0.0), sub) <= 1e-13);
    }
}

TEST_CASE("transfer matrix log Z") {
    SUBCASE("beta = 0 gives |interior| log q") {
        auto box = Box::make(2, {{0, 1}, {0, 7}});
        auto bc = BoundaryCondition::free_boundary(box);
        for (int q : {2, 3}) {
            double lz =
                transfer_matrix_log_z(box, bc, ModelParams(q, 0.0), 1);
            CHECK(lz == doctest::Approx(16 * std::log(q)).epsilon(1e-12));
        }
    }
    SUBCASE("2x8 strip matches enumeration, several bcs") {
        auto box = Box::make(2, {{0, 1}, {0, 7}});
        std::vector<BoundaryCondition> bcs;
        bcs.push_back(BoundaryCondition::free_boundary(box));
        bcs.push_back(BoundaryCondition::pure(box, 1));
        bcs.push_back(BoundaryCondition::dobrushin(box, 1, 4, 2, 1));
        for (const auto& bc : bcs)
            for (double beta : {0.4, 1.1, 8.0}) {
                ModelParams p(2, beta);
                auto m = ExactMeasure::enumerate(box, bc, p);
                double tm = transfer_matrix_log_z(box, bc, p, 1);
                CHECK(tm == doctest::Approx(m.log_partition())
                                .epsilon(1e-10));
            }
    }
    SUBCASE("1xn chain across both axes choices") {
        auto box = Box::make(1, {{0, 9}});
        auto bc = BoundaryCondition::free_boundary(box);
        ModelParams p(2, 0.9);
        auto m = ExactMeasure::enumerate(box, bc, p);
        CHECK(transfer_matrix_log_z(box, bc, p, 0) ==
              doctest::Approx(m.log_partition()).epsilon(1e-10));
    }
    SUBCASE("3d column with dobrushin bc, q = 3") {
        auto box = Box::make(3, {{0, 1}, {0, 1}, {-2, 1}});
        auto bc = BoundaryCondition::dobrushin(box, 2, 0, 1, 2);
        ModelParams p(3, 1.7);
        auto m = ExactMeasure::enumerate(box, bc, p);
        CHECK(transfer_matrix_log_z(box, bc, p, 2) ==
              doctest::Approx(m.log_partition()).epsilon(1e-10));
    }
    SUBCASE("cross-section cap is enforced") {
        auto box = Box::make(2, {{0, 19}, {0, 19}});
        auto bc = BoundaryCondition::free_boundary(box);
        CHECK_THROWS_AS(
            transfer_matrix_log_z(box, bc, ModelParams(2, 1.0), 1),
            CapExceeded);
    }
}

TEST_CASE("transfer matrix cylinder probabilities match enumeration") {
    auto box = Box::make(3, {{0, 1}, {0, 1}, {-2, 1}});
    auto bc = BoundaryCondition::dobrushin(box, 2, 0, 2, 1);
    for (int q : {2, 3})
        for (double beta : {0.0, 0.8, 2.5}) {
            ModelParams p(q, beta);
            auto m = ExactMeasure::enumerate(box, bc, p);
            double lz = transfer_matrix_log_z(box, bc, p, 2);
            std::vector<std::pair<std::vector<int>, int>> constraints = {
                {{0, 0, 1}, 2}, {{0, 0, -2}, 1}};
            double lc =
                transfer_matrix_log_weight_sum(box, bc, p, 2, constraints);
            double tm_prob = std::exp(lc - lz);
            auto joint = event_and(
                event_site_color(box, std::vector<int>{0, 0, 1}, 2),
                event_site_color(box, std::vector<int>{0, 0, -2}, 1));
            CHECK(tm_prob == doctest::Approx(m.prob(joint)).epsilon(1e-10));
        }
}

TEST_CASE("block majority event") {
    auto box = Box::make(3, {{-1, 1}, {-1, 1}, {-3, 2}});
    auto ev = event_block_majority(box, std::vector<int>{0, 0, 1}, 3, +1);
    SpinConfig s(box, 2);
    CHECK(ev.pred(s));
    // flip 14 of the 27 block sites to minus
    int flipped = 0;
    for (std::int32_t i = 0; i < box.interior_count() && flipped < 14; ++i) {
        auto c = box.interior_coord(i);
        if (std::abs(c[0]) <= 1 && std::abs(c[1]) <= 1 && c[2] >= 0 &&
            c[2] <= 2) {
            s.set(i, 1);
            ++flipped;
        }
    }
    REQUIRE(flipped == 14);
    CHECK_FALSE(ev.pred(s));
    CHECK_THROWS_AS(
        event_block_majority(box, std::vector<int>{0, 0, 1}, 2, +1),
        std::invalid_argument);
}
